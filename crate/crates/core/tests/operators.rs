mod common;

use common::*;
use coopjump::linalg::{dagger, kron, unvectorize, vectorize, C64};
use coopjump::model::{fig4_params, fig5_params, SystemParams};
use coopjump::operators::*;
use ndarray::Array2;

fn kron3(a: &Array2<C64>, b: &Array2<C64>, c: &Array2<C64>) -> Array2<C64> {
    kron(&kron(a, b), c)
}

fn eye(d: usize) -> Array2<C64> {
    Array2::eye(d)
}

/// Liouvillian from the textbook Kronecker formula, for comparison with the
/// sparse construction.
fn kron_liouvillian(h: &Array2<C64>, ch: &[JumpChannel]) -> Array2<C64> {
    let d = h.nrows();
    let mi = C64::new(0.0, -1.0);
    let mut m = (kron(&eye(d), h) - kron(&h.mapv(|z| z.conj()), &eye(d))).mapv(|z| z * mi);
    for c in ch {
        m = m + kron(&c.op.mapv(|z| z.conj()), &c.op).mapv(|z| z * c.rate);
    }
    m
}

fn coupled_v() -> SystemParams {
    fig4_params().with_c3(C64::new(-3e7, 5e7))
}

fn coupled_d() -> SystemParams {
    fig5_params().with_c3(C64::new(4e7, -2e7))
}

#[test]
fn single_atom_raising_operator() {
    let ops = transition_operators(1);
    let s = ops.raising(0, 1);
    assert_eq!(s.dim(), (3, 3));
    assert_eq!(s[[1, 0]], C64::new(1.0, 0.0));
    assert_eq!(s.iter().filter(|z| z.norm() != 0.0).count(), 1);
}

#[test]
fn lowering_is_adjoint_of_raising() {
    let ops = transition_operators(3);
    for i in 0..3 {
        for j in 1..=3 {
            assert_eq!(ops.lowering(i, j), dagger(ops.raising(i, j)));
        }
    }
}

#[test]
fn s13_projector_on_first_atom() {
    let ops = transition_operators(3);
    let p = ops.raising(0, 3).dot(&ops.lowering(0, 3));
    let mut single = Array2::<C64>::zeros((3, 3));
    single[[2, 2]] = C64::new(1.0, 0.0);
    let expected = kron3(&single, &eye(3), &eye(3));
    assert!(max_abs(&(&p - &expected)) == 0.0);
    assert_eq!(p.diag().sum().re, 9.0);
}

#[test]
fn zero_parameters_give_zero_hamiltonian() {
    let p = SystemParams::v(0.0, 0.0, 0.0);
    let h = conditional_hamiltonian(&p).unwrap();
    assert_eq!(max_abs(&h), 0.0);
}

#[test]
fn single_atom_level_three_decays_at_a3() {
    let p = SystemParams::v(2e3, 5e2, 20.0).with_n_atoms(1);
    let h = conditional_hamiltonian(&p).unwrap();
    assert!(rel(-2.0 * h[[2, 2]].im, 2e3) < 1e-14);
}

#[test]
fn uncoupled_hamiltonian_is_sum_of_single_atoms() {
    for base in [fig4_params(), fig5_params()] {
        let h3 = conditional_hamiltonian(&base).unwrap();
        let h1 = conditional_hamiltonian(&base.with_n_atoms(1)).unwrap();
        let sum = kron3(&h1, &eye(3), &eye(3)) + kron3(&eye(3), &h1, &eye(3)) + kron3(&eye(3), &eye(3), &h1);
        assert!(max_abs(&(&h3 - &sum)) <= 1e-12 * max_abs(&h3));
    }
}

#[test]
fn collective_rates_for_three_atoms() {
    let p = coupled_v();
    let r = p.collective_rates(3);
    assert_eq!(r, vec![2e8 - 6e7, 2e8 + 3e7, 2e8 + 3e7]);
    let ch = jump_channels(&p).unwrap();
    assert!(ch.iter().all(|c| c.rate >= 0.0));
}

#[test]
fn uncoupled_reset_equals_independent_atoms() {
    let mut r = rng(1);
    for base in [fig4_params(), fig5_params()] {
        let coll = jump_channels(&base).unwrap();
        let single = single_atom_channels(&base).unwrap();
        let rho = random_hermitian(&mut r, 27);
        let reset = |ch: &[JumpChannel]| {
            ch.iter().fold(Array2::<C64>::zeros((27, 27)), |acc, c| {
                acc + c.op.dot(&rho).dot(&dagger(&c.op)).mapv(|z| z * c.rate)
            })
        };
        let a = reset(&coll);
        assert!(max_abs(&(&a - &reset(&single))) <= 1e-12 * max_abs(&a));
    }
}

#[test]
fn reset_of_all_shelved_state() {
    let p = coupled_d();
    let e2 = index_of(&[1, 1, 1]);
    let mut rho = Array2::<C64>::zeros((27, 27));
    rho[[e2, e2]] = C64::new(1.0, 0.0);
    let out = jump_channels(&p)
        .unwrap()
        .into_iter()
        .filter(|c| c.transition == 1)
        .fold(Array2::<C64>::zeros((27, 27)), |acc, c| acc + c.op.dot(&rho).dot(&dagger(&c.op)).mapv(|z| z * c.rate));
    // |2> decays on transition 1 only, so just the states with one atom
    // moved to |1> appear.
    let idx: Vec<usize> = [[0, 1, 1], [1, 0, 1], [1, 1, 0]].iter().map(|l| index_of(l)).collect();
    let total: f64 = out.diag().iter().map(|z| z.re).sum();
    assert!(rel(total, 3.0 * p.a[0]) < 1e-12);
    // With C1 = 0 the three atoms reset incoherently: an equal mixture.
    for &a in &idx {
        for &b in &idx {
            let expected = if a == b { p.a[0] } else { 0.0 };
            assert!((out[[a, b]] - expected).norm() < 1e-12 * p.a[0]);
        }
    }
    let support: f64 = idx.iter().map(|&a| out[[a, a]].re).sum();
    assert!(rel(support, total) < 1e-12);
}

#[test]
fn channels_orthonormal_per_transition() {
    let p = coupled_v();
    let ch = jump_channels(&p).unwrap();
    for a in &ch {
        for b in &ch {
            if a.transition != b.transition {
                continue;
            }
            let ip: C64 = a.op.iter().zip(b.op.iter()).map(|(x, y)| x.conj() * y).sum();
            // Each single-atom lowering operator has Hilbert-Schmidt norm² 9.
            let expected = if std::ptr::eq(a, b) { 9.0 } else { 0.0 };
            assert!((ip.re - expected).abs() < 1e-12 && ip.im.abs() < 1e-12);
        }
    }
}

#[test]
fn sparse_construction_matches_kronecker_formula() {
    for p in [coupled_v(), coupled_d(), fig4_params().with_n_atoms(2)] {
        let h = conditional_hamiltonian(&p).unwrap();
        let ch = jump_channels(&p).unwrap();
        let l = generator(&p).unwrap();
        let k = kron_liouvillian(&h, &ch);
        assert!(max_abs(&(&l.matrix - &k)) <= 1e-12 * max_abs(&k));
    }
}

#[test]
fn trace_annihilation() {
    let mut r = rng(2);
    for p in [coupled_v(), coupled_d()] {
        let l = generator(&p).unwrap();
        let d = 27;
        // The trace functional is vec(I)ᵀ.
        let tr = vectorize(&eye(d));
        let row = tr.dot(&l.matrix);
        assert!(row.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-12 * max_abs(&l.matrix));
        let lnorm = l.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..100 {
            let rho = random_hermitian(&mut r, d);
            let rn = rho.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let t = l.apply(&rho).diag().sum();
            assert!(t.norm() <= 1e-12 * lnorm * rn);
        }
    }
}

#[test]
fn hermiticity_preservation() {
    let mut r = rng(3);
    for p in [coupled_v(), coupled_d()] {
        let l = generator(&p).unwrap();
        for _ in 0..10 {
            let rho = random_matrix(&mut r, 27);
            let a = l.apply(&dagger(&rho));
            let b = dagger(&l.apply(&rho));
            assert!(max_abs(&(&a - &b)) <= 1e-12 * max_abs(&a));
        }
    }
}

#[test]
fn decay_jump_consistency() {
    for p in [coupled_v(), coupled_d()] {
        let h = conditional_hamiltonian(&p).unwrap();
        let lhs = (&h - &dagger(&h)).mapv(|z| z * C64::new(0.0, 1.0));
        let rhs = jump_channels(&p)
            .unwrap()
            .iter()
            .fold(Array2::<C64>::zeros((27, 27)), |acc, c| acc + dagger(&c.op).dot(&c.op).mapv(|z| z * c.rate));
        assert!(max_abs(&(&lhs - &rhs)) <= 1e-12 * max_abs(&rhs));
    }
}

#[test]
fn uncoupled_liouvillian_obeys_product_rule() {
    // At C = 0, L(ρa⊗ρb⊗ρc) = (L1ρa)⊗ρb⊗ρc + ρa⊗(L1ρb)⊗ρc + ρa⊗ρb⊗(L1ρc).
    let mut r = rng(4);
    for base in [fig4_params(), fig5_params()] {
        let l3 = generator(&base).unwrap();
        let l1 = generator(&base.with_n_atoms(1)).unwrap();
        let (a, b, c) = (random_matrix(&mut r, 3), random_matrix(&mut r, 3), random_matrix(&mut r, 3));
        let lhs = l3.apply(&kron3(&a, &b, &c));
        let rhs = kron3(&l1.apply(&a), &b, &c) + kron3(&a, &l1.apply(&b), &c) + kron3(&a, &b, &l1.apply(&c));
        assert!(max_abs(&(&lhs - &rhs)) <= 1e-12 * max_abs(&lhs));
    }
}

#[test]
fn perturbation_linear_in_omega2() {
    let p = coupled_v();
    let mut q = p;
    q.omega2 *= 2.0;
    let l1 = liouvillian(&p).unwrap().perturbation.matrix;
    let l2 = liouvillian(&q).unwrap().perturbation.matrix;
    assert!(max_abs(&(&l2 - &l1.mapv(|z| z * 2.0))) <= 1e-12 * max_abs(&l2));
}

#[test]
fn d_scheme_unperturbed_drops_weak_processes() {
    let mut p = coupled_d();
    p.c[0] = C64::new(0.3, 0.1);
    p.c[1] = C64::new(0.2, -0.1);
    let l = liouvillian(&p).unwrap();
    let bare = generator(&SystemParams::d(0.0, 0.0, p.a[2], p.omega3).with_c3(p.c[2])).unwrap();
    assert!(max_abs(&(&l.unperturbed.matrix - &bare.matrix)) == 0.0);
}

#[test]
fn vectorization_is_column_stacking() {
    let m = Array2::from_shape_fn((3, 3), |(r, c)| C64::new((r + 10 * c) as f64, 0.0));
    let v = vectorize(&m);
    assert_eq!(v[1].re, 1.0);
    assert_eq!(v[3].re, 10.0);
    assert_eq!(unvectorize(&v, 3), m);
}

#[test]
fn dump_round_trip_and_header() {
    let l = generator(&coupled_v().with_n_atoms(1)).unwrap();
    let mut buf = Vec::new();
    l.write_dump(&mut buf).unwrap();
    assert_eq!(&buf[8..16], DUMP_TAG);
    assert_eq!(u64::from_le_bytes(buf[..8].try_into().unwrap()), 9);
    let back = Superoperator::read_dump(&buf[..]).unwrap();
    assert_eq!(back.matrix, l.matrix);
}

#[test]
fn negative_collective_rate_is_unphysical() {
    let p = fig4_params().with_c3(C64::new(-1.2e8, 0.0));
    assert!(matches!(jump_channels(&p), Err(coopjump::Error::Unphysical(_))));
    assert_eq!(p.validate().unwrap_err().exit_code(), 3);
}
