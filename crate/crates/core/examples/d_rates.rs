//! D-scheme rates: numeric p21 and p32 against their exact fractions, and
//! the enhancement of p32 near 0.7 λ3.

use coopjump::model::{fig5_params, params_from_geometry, Geometry};
use coopjump::rates::{closed_form_d, transition_rates};

fn main() -> coopjump::Result<()> {
    let base = fig5_params();
    let p32_0 = transition_rates(&base)?.get(3, 2);
    println!("{:>5} {:>12} {:>12} {:>12} {:>9}", "r/λ3", "p21", "p32", "exact p32", "p32/p32(0)");
    for k in 0..16 {
        let r = 0.5 + 0.1 * k as f64;
        let p = params_from_geometry(&base, &Geometry::equilateral(r))?;
        let rs = transition_rates(&p)?;
        let cf = closed_form_d(&p)?;
        println!("{r:>5.2} {:>12.5e} {:>12.5e} {:>12.5e} {:>9.3}", rs.get(2, 1), rs.get(3, 2), cf.get(3, 2), rs.get(3, 2) / p32_0);
    }
    Ok(())
}
