//! The symmetry-reduced solver against the full 729-dimensional one.

use std::time::Instant;

use coopjump::model::{fig4_params, fig5_params, params_from_geometry, Geometry};
use coopjump::rates::full::FullSolver;
use coopjump::rates::transition_rates;

fn main() -> coopjump::Result<()> {
    for (name, base, r) in [("V", fig4_params(), 1.2), ("D", fig5_params(), 0.7)] {
        let p = params_from_geometry(&base, &Geometry::equilateral(r))?;
        let t = Instant::now();
        let reduced = transition_rates(&p)?;
        let t_red = t.elapsed();
        let t = Instant::now();
        let full = FullSolver::new(&p)?.transition_rates()?;
        let t_full = t.elapsed();
        println!("{name} at {r} λ3 (reduced {t_red:.2?}, full {t_full:.2?}):");
        for ((i, j), v) in reduced.neighbours() {
            let f = full.get(i, j);
            println!("  p{i}{j} {v:.12e} {f:.12e} rel {:.1e}", (v - f).abs() / f.abs());
        }
    }
    Ok(())
}
