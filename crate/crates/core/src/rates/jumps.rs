//! Period statistics and double/triple jump rates of the four-level chain.

use crate::error::{Error, Result};

use super::RateSet;

/// Mean number of periods per unit time and mean period durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodStatistics {
    pub n: [f64; 4],
    pub durations: [f64; 4],
}

impl PeriodStatistics {
    /// Σ n_i T_i, which is 1 by construction.
    pub fn occupation_sum(&self) -> f64 {
        self.n.iter().zip(&self.durations).map(|(n, t)| n * t).sum()
    }
}

struct Chain {
    p01: f64,
    p10: f64,
    p12: f64,
    p21: f64,
    p23: f64,
    p32: f64,
}

impl Chain {
    fn new(rs: &RateSet) -> Result<Self> {
        if rs.levels() != 4 {
            return Err(Error::DegenerateChain("period statistics need four intensity levels".into()));
        }
        let c = Chain {
            p01: rs.get(0, 1),
            p10: rs.get(1, 0),
            p12: rs.get(1, 2),
            p21: rs.get(2, 1),
            p23: rs.get(2, 3),
            p32: rs.get(3, 2),
        };
        for (name, v) in [("p01", c.p01), ("p10", c.p10), ("p12", c.p12), ("p21", c.p21), ("p23", c.p23), ("p32", c.p32)] {
            if !(v > 0.0) {
                return Err(Error::DegenerateChain(format!("{name} = {v} leaves a subspace unreachable")));
            }
        }
        Ok(c)
    }

    fn denominator(&self) -> f64 {
        self.p21 * self.p32 * (self.p01 + self.p10) + self.p01 * self.p12 * (self.p23 + self.p32)
    }
}

pub fn period_statistics(rs: &RateSet) -> Result<PeriodStatistics> {
    let c = Chain::new(rs)?;
    let durations = [1.0 / c.p01, 1.0 / (c.p10 + c.p12), 1.0 / (c.p21 + c.p23), 1.0 / c.p32];
    // Balance of period entries: n0 = n1 p10 T1, n3 = n2 p23 T2 and
    // n1 = n0 + n2 p21 T2, which fixes the ratios; then Σ n_i T_i = 1.
    let n1 = 1.0;
    let n0 = n1 * c.p10 * durations[1];
    // n1 = n0 + n2 p21 T2  →  n2 = (n1 − n0) / (p21 T2)
    let n2 = (n1 - n0) / (c.p21 * durations[2]);
    let n3 = n2 * c.p23 * durations[2];
    let mut n = [n0, n1, n2, n3];
    let total: f64 = n.iter().zip(&durations).map(|(n, t)| n * t).sum();
    for x in &mut n {
        *x /= total;
    }
    Ok(PeriodStatistics { n, durations })
}

fn check_window(c: &Chain, t_m: f64) {
    let tmin = [1.0 / c.p01, 1.0 / (c.p10 + c.p12), 1.0 / (c.p21 + c.p23), 1.0 / c.p32]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if t_m > 0.1 * tmin {
        log::warn!("T_m = {t_m:.3e} s exceeds a tenth of the shortest mean period {tmin:.3e} s");
    }
}

/// Rate of double jumps whose intermediate period is shorter than `t_m`,
/// to first order in `t_m`.
pub fn double_jump_rate(rs: &RateSet, t_m: f64) -> Result<f64> {
    let c = Chain::new(rs)?;
    check_window(&c, t_m);
    let d = c.denominator();
    if d == 0.0 {
        return Err(Error::DegenerateChain("zero denominator".into()));
    }
    Ok(2.0 * c.p01 * c.p12 * c.p21 * c.p32 * (c.p10 + c.p23) * t_m / d)
}

/// Rate of triple jumps 0→3 and 3→0 whose two intermediate periods are
/// each shorter than `t_m`, to leading order.
pub fn triple_jump_rate(rs: &RateSet, t_m: f64) -> Result<f64> {
    let c = Chain::new(rs)?;
    check_window(&c, t_m);
    let d = c.denominator();
    if d == 0.0 {
        return Err(Error::DegenerateChain("zero denominator".into()));
    }
    Ok(2.0 * c.p01 * c.p10 * c.p12 * c.p21 * c.p23 * c.p32 * t_m * t_m / d)
}

/// The four double-jump channels before expanding the exponentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleJumpComponents {
    pub n02: f64,
    pub n20: f64,
    pub n13: f64,
    pub n31: f64,
}

impl DoubleJumpComponents {
    pub fn total(&self) -> f64 {
        self.n02 + self.n20 + self.n13 + self.n31
    }
}

/// Un-expanded double jump rates: a jump i→i±1 followed within `t_m` by a
/// jump i±1→i±2, with exponential probabilities for the short period.
pub fn double_jump_components(rs: &RateSet, t_m: f64) -> Result<DoubleJumpComponents> {
    let c = Chain::new(rs)?;
    let ps = period_statistics(rs)?;
    let n = ps.n;
    let a = c.p10 + c.p12;
    let b = c.p21 + c.p23;
    let short = |rate: f64| 1.0 - (-rate * t_m).exp();
    // Entering period 1 from 0 happens n0 times per unit time; the next
    // jump goes up with probability p12/a and falls within t_m with
    // probability 1 − e^{−a t_m}.
    let n02 = n[0] * c.p12 / a * short(a);
    let n20 = n[2] * (c.p21 / b) * (c.p10 / a) * short(a);
    let n13 = n[1] * (c.p12 / a) * (c.p23 / b) * short(b);
    let n31 = n[3] * c.p21 / b * short(b);
    Ok(DoubleJumpComponents { n02, n20, n13, n31 })
}
