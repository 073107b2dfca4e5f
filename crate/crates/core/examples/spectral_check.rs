//! Slow eigenvalues of the full Liouvillian against the nonzero
//! eigenvalues of the rate generator. Agreement means the periods are
//! well separated from the relaxation inside a period. Degenerate pairs
//! come from the two-dimensional sectors, which a symmetric initial state
//! never populates.
//!
//! Usage: spectral_check [preset]

use coopjump::model::{params_from_geometry, preset, Geometry};
use coopjump::operators::generator;
use coopjump::rates::transition_rates;
use ndarray::Array2;
use ndarray_linalg::Eig;

fn main() -> coopjump::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "desk-d".into());
    let pr = preset(&name).expect("unknown preset");
    let p = params_from_geometry(&pr.params, &Geometry::equilateral(pr.r))?;
    println!("{name}: separation ratio {:.1}", p.separation_ratio());

    let rs = transition_rates(&p)?;
    let n = rs.levels();
    let mut q = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                q[[i, j]] = rs.get(i, j);
                q[[i, i]] -= rs.get(i, j);
            }
        }
    }
    let (qv, _) = q.eig()?;
    let mut rates: Vec<f64> = qv.iter().map(|z| -z.re).filter(|&x| x > 1e-9).collect();
    rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("rate generator: {rates:.4?}");

    let (lv, _) = generator(&p)?.matrix.eig()?;
    let mut slow: Vec<f64> = lv.iter().map(|z| -z.re).filter(|&x| x > 1e-9).collect();
    slow.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("Liouvillian:    {:.4?}", &slow[..8.min(slow.len())]);
    Ok(())
}
