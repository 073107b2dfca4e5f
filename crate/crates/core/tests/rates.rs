mod common;

use common::*;
use coopjump::linalg::{dagger, kron, C64};
use coopjump::model::{fig4_params, fig5_params, SystemParams};
use coopjump::operators::liouvillian;
use coopjump::rates::full::FullSolver;
use coopjump::rates::*;
use coopjump::symmetry::{build_dicke_basis, product_subspace};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};

/// Exact D-scheme p21.
fn d_p21(p: &SystemParams) -> f64 {
    let (a2, a, om, c) = (p.a[1], p.a[2], p.omega3, p.c[2]);
    let x = a * a + 2.0 * om * om;
    2.0 * a2 * om * om * x / (x * x + a * a * (c.norm_sqr() + 2.0 * a * c.re))
}

/// D-scheme p32 with the last denominator term (|C3|² + 2 A3 Re C3)².
fn d_p32(p: &SystemParams) -> f64 {
    let (a2, a, om, c) = (p.a[1], p.a[2], p.omega3, p.c[2]);
    let x = a * a + 2.0 * om * om;
    let q = c.norm_sqr() + 2.0 * a * c.re;
    let num = 3.0 * a2 * om * om * (x * x + a * a * q);
    let den = x * (x * x + 3.0 * a * a * q) + 2.0 * a * a * (c.norm_sqr() * (a + c).norm_sqr() + q * q);
    num / den
}

fn rates(p: &SystemParams) -> RateSet {
    transition_rates(p).unwrap()
}

/// Relative first-order coefficient d ln p_ij / d Re C3 by central differences.
fn log_slope(base: &SystemParams, i: usize, j: usize, h: f64) -> f64 {
    let up = rates(&base.with_c3(C64::new(h, 0.0))).get(i, j);
    let dn = rates(&base.with_c3(C64::new(-h, 0.0))).get(i, j);
    let mid = rates(base).get(i, j);
    (up - dn) / (2.0 * h * mid)
}

#[test]
fn shelved_quasisteady_state() {
    for base in [fig4_params(), fig5_params()] {
        let q = quasisteady_state(&base.with_c3(C64::new(1e7, 3e7)), 0).unwrap();
        let e2 = coopjump::operators::index_of(&[1, 1, 1]);
        let mut expected = Array2::<C64>::zeros((27, 27));
        expected[[e2, e2]] = C64::new(1.0, 0.0);
        assert!(max_abs(&(&q.rho - &expected)) < 1e-12);
    }
}

#[test]
fn quasisteady_states_are_density_matrices() {
    let mut r = rng(21);
    for base in [fig4_params(), fig5_params()] {
        let p = base.with_c3(random_c3(&mut r, base.a[2]));
        let l0 = liouvillian(&p).unwrap().unperturbed;
        let lnorm = l0.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for q in RateSolver::new(&p).unwrap().quasisteady_states().unwrap() {
            let rho = &q.rho;
            assert!(max_abs(&(rho - &dagger(rho))) < 1e-12);
            assert!((rho.diag().sum() - 1.0).norm() < 1e-12);
            let (ev, _) = rho.eigh(UPLO::Lower).unwrap();
            assert!(ev.iter().all(|&e| e >= -1e-10), "negative eigenvalue in subspace {}", q.subspace);
            assert!(max_abs(&l0.apply(rho)) <= 1e-10 * lnorm);
            // Supported on its own block.
            for ((a, b), z) in rho.indexed_iter() {
                if z.norm() > 0.0 {
                    assert_eq!((product_subspace(a, 3), product_subspace(b, 3)), (q.subspace, q.subspace));
                }
            }
        }
    }
}

#[test]
fn uncoupled_bright_state_is_product_of_single_atoms() {
    // Steady state of one driven two-level atom {|1>, |3>} from its own 4×4
    // generator, embedded into the three-level space.
    let (a, om) = (2e8, 5e7);
    let mut h = Array2::<C64>::zeros((2, 2));
    h[[1, 0]] = C64::new(0.5 * om, 0.0);
    h[[0, 1]] = C64::new(0.5 * om, 0.0);
    h[[1, 1]] = C64::new(0.0, -0.5 * a);
    let mut low = Array2::<C64>::zeros((2, 2));
    low[[0, 1]] = C64::new(1.0, 0.0);
    let eye = Array2::<C64>::eye(2);
    let mi = C64::new(0.0, -1.0);
    let l = (kron(&eye, &h) - kron(&h.mapv(|z| z.conj()), &eye)).mapv(|z| z * mi) + kron(&low, &low).mapv(|z| z * a);
    let (_, sv, vt) = l.svd(false, true).unwrap();
    assert!(sv[3] < 1e-8 * sv[0] && sv[2] > 1e-3 * sv[0]);
    let v = vt.unwrap().row(3).mapv(|z| z.conj());
    let tr = v[0] + v[3];
    let mut one = Array2::<C64>::zeros((3, 3));
    for (k, (r, c)) in [(0, 0), (2, 0), (0, 2), (2, 2)].into_iter().enumerate() {
        one[[r, c]] = v[k] / tr;
    }
    let expected = kron(&kron(&one, &one), &one);
    let q = quasisteady_state(&fig4_params(), 3).unwrap();
    let d = max_abs(&(&q.rho - &expected));
    assert!(d < 1e-10, "{d} {} {}", q.rho[[0, 0]], expected[[0, 0]]);
}

#[test]
fn dual_states_biorthonormal_and_left_null() {
    let mut r = rng(22);
    for base in [fig4_params(), fig5_params()] {
        let p = base.with_c3(random_c3(&mut r, base.a[2]));
        let s = RateSolver::new(&p).unwrap();
        let states = s.quasisteady_states().unwrap();
        let duals = s.dual_states(&states).unwrap();
        let l0 = liouvillian(&p).unwrap().unperturbed;
        let l0d = dagger(&l0.matrix);
        for d in &duals {
            for q in &states {
                let ip: C64 = d.rho.iter().zip(q.rho.iter()).map(|(x, y)| x.conj() * y).sum();
                let expected = if d.subspace == q.subspace { 1.0 } else { 0.0 };
                assert!((ip - expected).norm() < 1e-10);
            }
            let v = coopjump::linalg::vectorize(&d.rho);
            let res = l0d.dot(&v);
            assert!(res.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-8 * max_abs(&l0.matrix));
        }
        // Σ_j duals reproduce the trace on span{ρ_ss,i}.
        let coef = [0.3, -1.2, 2.0, 0.7];
        let x = states.iter().zip(coef).fold(Array2::<C64>::zeros((27, 27)), |acc, (q, c)| acc + q.rho.mapv(|z| z * c));
        let total: C64 = duals.iter().map(|d| d.rho.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum::<C64>()).sum();
        assert!((total - x.diag().sum()).norm() < 1e-10);
    }
}

#[test]
fn uncoupled_duals_live_on_their_blocks() {
    for base in [fig4_params(), fig5_params()] {
        let s = RateSolver::new(&base).unwrap();
        let states = s.quasisteady_states().unwrap();
        for d in s.dual_states(&states).unwrap() {
            for ((a, b), z) in d.rho.indexed_iter() {
                if z.norm() > 1e-12 {
                    assert_eq!((product_subspace(a, 3), product_subspace(b, 3)), (d.subspace, d.subspace));
                }
            }
        }
    }
}

#[test]
fn v_rates_of_independent_atoms() {
    let p = fig4_params();
    let rs = rates(&p);
    let (a, om3, om2): (f64, f64, f64) = (2e8, 5e7, 1e4);
    let single_up = a * om2 * om2 / (om3 * om3);
    let single_down = a.powi(3) * om2 * om2 / (om3 * om3 * (a * a + 2.0 * om3 * om3));
    for (i, j, expected) in [
        (0, 1, 3.0 * single_up),
        (1, 2, 2.0 * single_up),
        (2, 3, single_up),
        (1, 0, single_down),
        (2, 1, 2.0 * single_down),
        (3, 2, 3.0 * single_down),
    ] {
        assert!(rel(rs.get(i, j), expected) < 1e-8, "p{i}{j} = {} vs {expected}", rs.get(i, j));
    }
    assert!(rel(rs.get(0, 1), 24.0) < 1e-10);
    assert!(rel(rs.get(1, 0), 8e32 / 1.125e32) < 1e-10);
    assert!(rel(rs.get(3, 2), 3.0 * 8e32 / 1.125e32) < 1e-8);
}

#[test]
fn v_rate_ratios_and_coupling_independence() {
    let mut r = rng(23);
    for _ in 0..3 {
        let p = fig4_params().with_c3(random_c3(&mut r, 2e8));
        let rs = rates(&p);
        let b = rates(&fig4_params());
        assert!(rel(rs.get(0, 1), b.get(0, 1)) < 1e-8);
        assert!(rel(rs.get(1, 0), b.get(1, 0)) < 1e-8);
        // p01/p23 is 3 only at zeroth order; p23 picks up the coupling.
        assert!(rel(b.get(0, 1) / b.get(2, 3), 3.0) < 1e-10);
    }
}

#[test]
fn v_p32_slope_matches_first_order_coefficient() {
    let (a, om3, om2): (f64, f64, f64) = (2e8, 5e7, 1e4);
    let x = a * a + 2.0 * om3 * om3;
    let coeff = 3.0 * a.powi(3) * om2 * om2 / (om3 * om3 * x) * 4.0 * a * (a * a + 4.0 * om3 * om3) / (x * x);
    let h = 1e-3 * a;
    let up = rates(&fig4_params().with_c3(C64::new(h, 0.0))).get(3, 2);
    let dn = rates(&fig4_params().with_c3(C64::new(-h, 0.0))).get(3, 2);
    assert!(rel((up - dn) / (2.0 * h), coeff) < 1e-2);
}

#[test]
fn factor_of_two_between_first_order_terms() {
    let base = fig4_params();
    let h = 1e-3 * 2e8;
    let s12 = log_slope(&base, 1, 2, h);
    let s23 = log_slope(&base, 2, 3, h);
    let s21 = log_slope(&base, 2, 1, h);
    let s32 = log_slope(&base, 3, 2, h);
    assert!(rel(s23, 2.0 * s12) < 1e-2, "{s23} vs 2·{s12}");
    assert!(rel(s32, 2.0 * s21) < 1e-2, "{s32} vs 2·{s21}");
}

#[test]
fn three_atom_first_order_terms_match_two_atoms() {
    let base3 = fig4_params();
    let base2 = fig4_params().with_n_atoms(2);
    let h = 1e-3 * 2e8;
    for (i, j) in [(1, 2), (2, 1)] {
        let s3 = log_slope(&base3, i, j, h);
        let s2 = log_slope(&base2, i, j, h);
        assert!(rel(s3, s2) < 1e-2, "p{i}{j}: {s3} vs {s2}");
    }
}

#[test]
fn excited_populations_share_first_order_factor() {
    // Relative first-order change of the Dicke populations of ρ_ss,3. The
    // ground state g and s311 absorb the normalization; all others agree.
    let b = build_dicke_basis(3);
    let u = &b.unitary;
    let h = 2e4;
    let pops = |c: f64| {
        let q = quasisteady_state(&fig4_params().with_c3(C64::new(c, 0.0)), 3).unwrap().rho;
        dagger(u).dot(&q).dot(u).diag().mapv(|z| z.re)
    };
    let (p0, p1, m1) = (pops(0.0), pops(h), pops(-h));
    let factor = |label: &str| {
        let k = b.index(label).unwrap();
        (p1[k] - m1[k]) / (2.0 * h * p0[k])
    };
    let common = factor("e3");
    for label in ["b311", "c311", "s133", "b133", "c133"] {
        assert!(rel(factor(label), common) < 1e-6, "{label}");
    }
    assert!(rel(factor("s311"), common) > 0.1);
}

#[test]
fn coherence_route_agrees_with_projector_route() {
    let mut r = rng(24);
    for _ in 0..3 {
        let p = fig4_params().with_c3(random_c3(&mut r, 2e8));
        let s = RateSolver::new(&p).unwrap();
        let a = s.transition_rates_v().unwrap();
        let b = s.coherence_rates_v().unwrap();
        for ((i, j), v) in a.neighbours() {
            assert!(rel(v, b.get(i, j)) < 1e-8, "p{i}{j}");
        }
    }
}

#[test]
fn d_rates_exact_in_coupling() {
    let mut r = rng(25);
    for k in 0..20 {
        let p = fig5_params().with_c3(random_c3(&mut r, 2e8));
        let rs = rates(&p);
        assert!(rel(rs.get(2, 1), d_p21(&p)) < 1e-8, "p21 at draw {k}");
        assert!(rel(rs.get(3, 2), d_p32(&p)) < 1e-8, "p32 at draw {k}");
        assert!(rel(rs.get(0, 1), 3.0) < 1e-8);
        assert!(rel(rs.get(1, 2), 2.0) < 1e-8);
        assert!(rel(rs.get(2, 3), 1.0) < 1e-8);
        let cf = closed_form_d(&p).unwrap();
        for ((i, j), v) in rs.neighbours() {
            assert!(rel(v, cf.get(i, j)) < 1e-8);
        }
        assert!(rs.resolvent_norm.unwrap().is_finite());
    }
}

#[test]
fn d_rates_of_independent_atoms() {
    let rs = rates(&fig5_params());
    assert!(rel(rs.get(1, 0), 1e14 / 4.02e16) < 1e-10);
    assert!(rel(rs.get(3, 2), 1.5 * rs.get(2, 1)) < 1e-10);
}

#[test]
fn d_first_order_coefficients() {
    let (a, om): (f64, f64) = (2e8, 1e7);
    let x = a * a + 2.0 * om * om;
    let h = 1e-4 * a;
    let s21 = log_slope(&fig5_params(), 2, 1, h);
    let s32 = log_slope(&fig5_params(), 3, 2, h);
    assert!(rel(s21, -2.0 * a.powi(3) / (x * x)) < 1e-2);
    assert!(rel(s32, -4.0 * a.powi(3) / (x * x)) < 1e-2);
}

#[test]
fn no_direct_double_jumps() {
    let mut r = rng(26);
    for base in [fig4_params(), fig5_params()] {
        for _ in 0..20 {
            let rs = rates(&base.with_c3(random_c3(&mut r, base.a[2])));
            assert!(rs.max_skip() <= 1e-10 * rs.max_rate());
        }
    }
}

#[test]
fn uncoupled_rates_equal_closed_forms() {
    for base in [fig4_params(), fig5_params()] {
        let rs = rates(&base);
        let cf = closed_form(&base).unwrap();
        for ((i, j), v) in rs.neighbours() {
            assert!(rel(v, cf.get(i, j)) < 1e-8);
        }
    }
}

#[test]
fn v_residual_is_second_order() {
    let a = 2e8;
    let res = |f: f64| {
        let p = fig4_params().with_c3(C64::new(f * a, 0.0));
        let num = rates(&p);
        let cf = closed_form_v(&p).unwrap();
        num.neighbours().iter().map(|((i, j), v)| (v - cf.get(*i, *j)).abs()).fold(0.0, f64::max)
    };
    let xs = [1e-4, 2e-4, 4e-4];
    let ys: Vec<f64> = xs.iter().map(|&x| res(x)).collect();
    let slope = ((ys[2] / ys[0]).ln()) / ((xs[2] / xs[0]) as f64).ln();
    assert!(slope >= 1.9, "fitted exponent {slope}");
}

#[test]
fn period_statistics_match_markov_chain() {
    let mut r = rng(27);
    for base in [fig4_params(), fig5_params()] {
        let rs = rates(&base.with_c3(random_c3(&mut r, base.a[2])));
        let ps = period_statistics(&rs).unwrap();
        assert!((ps.occupation_sum() - 1.0).abs() < 1e-10);
        let n = ps.n;
        assert!(rel(n[0], n[1] * rs.get(1, 0) / (rs.get(1, 0) + rs.get(1, 2))) < 1e-10);
        // Stationary distribution of the generator; periods per time are π_i/T_i.
        let mut q = Array2::<f64>::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    q[[i, j]] = rs.get(i, j);
                    q[[i, i]] -= rs.get(i, j);
                }
            }
        }
        let pi = stationary(&q);
        for i in 0..4 {
            assert!(rel(n[i], pi[i] / ps.durations[i]) < 1e-8);
        }
    }
}

/// Null vector of qᵀ normalized to sum one, by Gaussian elimination with
/// the last equation replaced by normalization.
fn stationary(q: &Array2<f64>) -> Array1<f64> {
    let n = q.nrows();
    let mut m = q.t().to_owned();
    let mut b = Array1::<f64>::zeros(n);
    for j in 0..n {
        m[[n - 1, j]] = 1.0;
    }
    b[n - 1] = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[[x, c]].abs().partial_cmp(&m[[y, c]].abs()).unwrap()).unwrap();
        for k in 0..n {
            m.swap([c, k], [piv, k]);
        }
        b.swap(c, piv);
        for rr in 0..n {
            if rr != c {
                let f = m[[rr, c]] / m[[c, c]];
                for k in 0..n {
                    m[[rr, k]] -= f * m[[c, k]];
                }
                b[rr] -= f * b[c];
            }
        }
    }
    (0..n).map(|i| b[i] / m[[i, i]]).collect()
}

#[test]
fn toy_chain_durations() {
    let mut p = Array2::<f64>::zeros((4, 4));
    for i in 0..3 {
        p[[i, i + 1]] = 1.0;
        p[[i + 1, i]] = 1.0;
    }
    let ps = period_statistics(&RateSet::new(p)).unwrap();
    assert_eq!(ps.durations, [1.0, 0.5, 0.5, 1.0]);
    assert!((ps.occupation_sum() - 1.0).abs() < 1e-12);
}

#[test]
fn double_jump_components_balance_and_expand() {
    let rs = rates(&fig4_params().with_c3(C64::new(-4e7, 6e7)));
    let c = double_jump_components(&rs, 1e-3).unwrap();
    assert!(rel(c.n02, c.n20) < 1e-10);
    assert!(rel(c.n13, c.n31) < 1e-10);
    let gap = |t: f64| (double_jump_components(&rs, t).unwrap().total() - double_jump_rate(&rs, t).unwrap()).abs() / t;
    let (g1, g2, g3) = (gap(1e-4), gap(1e-5), gap(1e-6));
    assert!(g2 < 0.2 * g1 && g3 < 0.2 * g2, "{g1} {g2} {g3}");
    let n = double_jump_rate(&rs, 1e-4).unwrap() / 1e-4;
    assert!(g3 < 1e-3 * n);
}

#[test]
fn triple_jump_rate_is_quadratic() {
    let rs = rates(&fig5_params().with_c3(C64::new(3e7, -2e7)));
    let t = 5e-3;
    assert!(rel(triple_jump_rate(&rs, 2.0 * t).unwrap() / triple_jump_rate(&rs, t).unwrap(), 4.0) < 1e-12);
}

#[test]
fn degenerate_chain_is_reported() {
    let mut p = Array2::<f64>::zeros((4, 4));
    p[[0, 1]] = 1.0;
    assert!(matches!(double_jump_rate(&RateSet::new(p), 1e-3), Err(coopjump::Error::DegenerateChain(_))));
}

#[test]
fn reduced_and_full_routes_agree() {
    let mut r = rng(28);
    for base in [fig4_params(), fig5_params()] {
        let p = base.with_c3(random_c3(&mut r, base.a[2]));
        let reduced = rates(&p);
        let full = FullSolver::new(&p).unwrap();
        let fr = full.transition_rates().unwrap();
        for ((i, j), v) in reduced.neighbours() {
            assert!(rel(v, fr.get(i, j)) < 1e-8, "p{i}{j}: {v} vs {}", fr.get(i, j));
        }
        let q_red = quasisteady_state(&p, 3).unwrap().rho;
        let q_full = &full.quasisteady_states().unwrap()[3].rho;
        assert!(max_abs(&(&q_red - q_full)) < 1e-8 * max_abs(q_full));
    }
}

#[test]
fn degenerate_null_space_is_an_error() {
    // Without any drive every level-3 population is stationary.
    let p = SystemParams::v(2e8, 0.0, 1e4);
    assert!(transition_rates(&p).is_err());
}

#[test]
fn two_atom_pipeline_runs() {
    let rs = rates(&fig4_params().with_n_atoms(2).with_c3(C64::new(2e7, 1e7)));
    assert_eq!(rs.levels(), 3);
    assert!(rs.max_skip() <= 1e-10 * rs.max_rate());
}
