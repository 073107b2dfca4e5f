//! Build the 729×729 Liouvillian for a coupled V array and check the
//! structural invariants: trace annihilation, Hermiticity preservation and
//! the balance between the conditional Hamiltonian and the jumps.

use coopjump::linalg::{dagger, max_abs, vectorize, C64};
use coopjump::model::{fig4_params, params_from_geometry, Geometry};
use coopjump::operators::{conditional_hamiltonian, generator, jump_channels, liouvillian};
use ndarray::Array2;

fn main() -> coopjump::Result<()> {
    let p = params_from_geometry(&fig4_params(), &Geometry::equilateral(0.8))?;
    let l = generator(&p)?;
    let scale = max_abs(&l.matrix);
    println!("C3 = {:.4e}, L is {}×{}, max |L| = {scale:.3e}", p.c[2], l.dim(), l.dim());

    let tr = vectorize(&Array2::<C64>::eye(27)).dot(&l.matrix);
    println!("trace annihilation  {:.2e}", tr.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale);

    let rho = Array2::from_shape_fn((27, 27), |(i, j)| C64::new((i * j % 7) as f64, i as f64 - j as f64));
    let a = l.apply(&dagger(&rho));
    let b = dagger(&l.apply(&rho));
    println!("hermiticity         {:.2e}", max_abs(&(&a - &b)) / max_abs(&a));

    let h = conditional_hamiltonian(&p)?;
    let lhs = (&h - &dagger(&h)).mapv(|z| z * C64::new(0.0, 1.0));
    let rhs = jump_channels(&p)?
        .iter()
        .fold(Array2::<C64>::zeros((27, 27)), |acc, c| acc + dagger(&c.op).dot(&c.op).mapv(|z| z * c.rate));
    println!("decay-jump balance  {:.2e}", max_abs(&(&lhs - &rhs)) / max_abs(&rhs));

    let split = liouvillian(&p)?;
    let nnz = |m: &Array2<C64>| m.iter().filter(|z| z.norm() > 0.0).count();
    println!("nonzeros: L0 {}, L1 {}", nnz(&split.unperturbed.matrix), nnz(&split.perturbation.matrix));
    Ok(())
}
