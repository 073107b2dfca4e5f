//! Closed-form rates for three atoms.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{LevelScheme, SystemParams};

use super::RateSet;

fn require_three(p: &SystemParams) -> Result<()> {
    if p.n_atoms != 3 {
        return Err(Error::Parameter("closed forms are given for three atoms only".into()));
    }
    Ok(())
}

fn from_neighbours(r: [f64; 6]) -> RateSet {
    let mut p = Array2::zeros((4, 4));
    let [p01, p10, p12, p21, p23, p32] = r;
    p[[0, 1]] = p01;
    p[[1, 0]] = p10;
    p[[1, 2]] = p12;
    p[[2, 1]] = p21;
    p[[2, 3]] = p23;
    p[[3, 2]] = p32;
    RateSet::new(p)
}

/// V-scheme rates: p01 and p10 exact, the rest to first order in Re C3.
pub fn closed_form_v(p: &SystemParams) -> Result<RateSet> {
    require_three(p)?;
    let (a, om3, om2) = (p.a[2], p.omega3, p.omega2);
    let re = p.c[2].re;
    let x = a * a + 2.0 * om3 * om3;
    let b = a * om2 * om2 / (om3 * om3);
    let p10 = a.powi(3) * om2 * om2 / (om3 * om3 * x);
    let k1 = a / x;
    let k2 = a * (a * a + 4.0 * om3 * om3) / (x * x);
    Ok(from_neighbours([
        3.0 * b,
        p10,
        2.0 * b * (1.0 + 2.0 * re * k1),
        2.0 * p10 * (1.0 + 2.0 * re * k2),
        b * (1.0 + 4.0 * re * k1),
        3.0 * p10 * (1.0 + 4.0 * re * k2),
    ]))
}

/// D-scheme rates, exact in C3.
pub fn closed_form_d(p: &SystemParams) -> Result<RateSet> {
    require_three(p)?;
    let (a1, a2, a, om) = (p.a[0], p.a[1], p.a[2], p.omega3);
    let c = p.c[2];
    let x = a * a + 2.0 * om * om;
    let q = c.norm_sqr() + 2.0 * a * c.re;
    let p21 = 2.0 * a2 * om * om * x / (x * x + a * a * q);
    let num = 3.0 * a2 * om * om * (x * x + a * a * q);
    let den = x * (x * x + 3.0 * a * a * q) + 2.0 * a * a * (c.norm_sqr() * (a + c).norm_sqr() + q * q);
    Ok(from_neighbours([3.0 * a1, a2 * om * om / x, 2.0 * a1, p21, a1, num / den]))
}

pub fn closed_form(p: &SystemParams) -> Result<RateSet> {
    match p.scheme {
        LevelScheme::V => closed_form_v(p),
        LevelScheme::D => closed_form_d(p),
    }
}
