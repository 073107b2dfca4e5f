//! Double and triple jump rates relative to independent atoms for both
//! schemes, from the Markov chain of intensity periods.

use coopjump::model::{fig4_params, fig5_params, params_from_geometry, Geometry};
use coopjump::rates::{double_jump_rate, period_statistics, transition_rates, triple_jump_rate};

fn main() -> coopjump::Result<()> {
    for (name, base, t_m) in [("V", fig4_params(), 1e-3), ("D", fig5_params(), 5e-3)] {
        let indep = transition_rates(&base)?;
        let stats = period_statistics(&indep)?;
        println!("{name} scheme, T_m = {t_m} s; mean period lengths {:?} s", stats.durations);
        let (dj0, tj0) = (double_jump_rate(&indep, t_m)?, triple_jump_rate(&indep, t_m)?);
        println!("  independent: n_dj = {dj0:.4e} s⁻¹, n_tj = {tj0:.4e} s⁻¹");
        for r in [0.6, 0.7, 0.8, 1.0, 1.2, 1.5, 2.0, 5.0, 10.0] {
            let rs = transition_rates(&params_from_geometry(&base, &Geometry::equilateral(r))?)?;
            println!(
                "  r = {r:>4} λ3: n_dj ×{:.3}, n_tj ×{:.3}",
                double_jump_rate(&rs, t_m)? / dj0,
                triple_jump_rate(&rs, t_m)? / tj0
            );
        }
    }
    Ok(())
}
