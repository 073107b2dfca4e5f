#![allow(dead_code)]

use coopjump::linalg::C64;
use coopjump::model::{params_from_geometry, Geometry, SystemParams};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_matrix(r: &mut ChaCha8Rng, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, d: usize) -> Array2<C64> {
    let m = random_matrix(r, d);
    let h = &m + &m.t().mapv(|z| z.conj());
    h.mapv(|z| z * 0.5)
}

/// Parameters at a random distance in [lo, hi] λ3.
pub fn at_random_distance(r: &mut ChaCha8Rng, base: &SystemParams, lo: f64, hi: f64) -> SystemParams {
    let d = r.random_range(lo..hi);
    params_from_geometry(base, &Geometry::equilateral(d)).unwrap()
}

/// A random C3 whose collective rates stay nonnegative.
pub fn random_c3(r: &mut ChaCha8Rng, a3: f64) -> C64 {
    loop {
        let c = C64::new(r.random_range(-0.9..0.9) * a3, r.random_range(-1.5..1.5) * a3);
        if a3 + 2.0 * c.re >= 0.0 && a3 - c.re >= 0.0 {
            return c;
        }
    }
}
