//! Dipole-dipole coupling constant C3 against the atom distance, with the
//! collective decay rates it implies for the equilateral triangle.

use coopjump::model::{coupling_constant, fig4_params, params_from_geometry, Geometry};

fn main() -> coopjump::Result<()> {
    let a3 = 2e8;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "r/λ3", "Re C3", "Im C3", "A3 + 2Re C3", "A3 - Re C3");
    for k in 0..16 {
        let r = 0.25 + 0.25 * k as f64;
        let c = coupling_constant(a3, 2.0 * std::f64::consts::PI * r, std::f64::consts::FRAC_PI_2)?;
        println!("{r:>6.2} {:>14.4e} {:>14.4e} {:>14.4e} {:>14.4e}", c.re, c.im, a3 + 2.0 * c.re, a3 - c.re);
    }
    // Close enough and the symmetric channel would need a negative rate.
    match params_from_geometry(&fig4_params(), &Geometry::equilateral(0.05)) {
        Ok(p) => println!("r = 0.05 λ3 accepted, C3 = {}", p.c[2]),
        Err(e) => println!("r = 0.05 λ3 rejected: {e}"),
    }
    Ok(())
}
