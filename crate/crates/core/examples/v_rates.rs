//! Transition rates of three V systems against the distance: the exact
//! Liouvillian route, the first-order closed form and independent atoms.

use coopjump::model::{fig4_params, params_from_geometry, Geometry};
use coopjump::rates::{closed_form_v, transition_rates};

fn main() -> coopjump::Result<()> {
    let base = fig4_params();
    let indep = transition_rates(&base)?;
    println!("independent atoms:");
    for ((i, j), v) in indep.neighbours() {
        println!("  p{i}{j} = {v:.6}");
    }
    println!("\n{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "r/λ3", "p23", "p32", "p32 1st", "p32/indep", "p21");
    for k in 0..11 {
        let r = 1.0 + 0.1 * k as f64;
        let p = params_from_geometry(&base, &Geometry::equilateral(r))?;
        let rs = transition_rates(&p)?;
        let cf = closed_form_v(&p)?;
        println!(
            "{r:>5.2} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            rs.get(2, 3),
            rs.get(3, 2),
            cf.get(3, 2),
            rs.get(3, 2) / indep.get(3, 2),
            rs.get(2, 1)
        );
    }
    Ok(())
}
