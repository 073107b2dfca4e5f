//! Quasisteady states and transition rates between intensity periods.
//!
//! The solver works in the permutation-symmetric sectors of the blocks
//! R_ij. Only those sectors are reachable from a symmetric initial state,
//! and within them the null space of L0 on each R_ii is one-dimensional.

mod closed;
pub mod full;
mod jumps;

use std::sync::OnceLock;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{
    dagger, diagonal_sum, frobenius, hermitize_normalize, hs_inner, norm, restricted_solve, unvectorize, vectorize,
    NullSplit, C64,
};
use crate::model::{LevelScheme, SystemParams};
use crate::operators::{hilbert_dim, liouvillian, Liouvillian};
use crate::symmetry::{build_dicke_basis, build_irrep_dm_basis, product_subspaces, reduce_operator, IrrepDMBasis};

pub use closed::{closed_form, closed_form_d, closed_form_v};
pub use jumps::{double_jump_components, double_jump_rate, period_statistics, triple_jump_rate, DoubleJumpComponents, PeriodStatistics};

/// Relative residual allowed for the restricted linear solves.
pub const SOLVE_TOLERANCE: f64 = 1e-8;

/// Cached symmetry-adapted density-matrix basis for `n` atoms.
pub fn irrep_basis(n: usize) -> &'static IrrepDMBasis {
    static CACHE: [OnceLock<IrrepDMBasis>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[n - 1].get_or_init(|| build_irrep_dm_basis(&build_dicke_basis(n)))
}

#[derive(Debug, Clone)]
pub struct QuasisteadyState {
    pub subspace: usize,
    pub rho: Array2<C64>,
}

#[derive(Debug, Clone)]
pub struct DualState {
    pub subspace: usize,
    pub rho: Array2<C64>,
}

/// Transition rates p_ij (s⁻¹) between intensity periods, with the
/// diagonal left at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub p: Array2<f64>,
    /// Largest Frobenius norm of the neglected resolvent correction
    /// (D scheme only).
    pub resolvent_norm: Option<f64>,
}

impl RateSet {
    pub fn new(p: Array2<f64>) -> Self {
        RateSet { p, resolvent_norm: None }
    }

    pub fn levels(&self) -> usize {
        self.p.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[[i, j]]
    }

    pub fn max_rate(&self) -> f64 {
        self.p.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest |p_ij| with |i − j| ≥ 2.
    pub fn max_skip(&self) -> f64 {
        let n = self.levels();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) >= 2 {
                    m = m.max(self.p[[i, j]].abs());
                }
            }
        }
        m
    }

    /// The six nearest-neighbour rates in the order p01, p10, p12, p21, p23, p32.
    pub fn neighbours(&self) -> Vec<((usize, usize), f64)> {
        let mut out = Vec::new();
        for i in 0..self.levels() - 1 {
            out.push(((i, i + 1), self.p[[i, i + 1]]));
            out.push(((i + 1, i), self.p[[i + 1, i]]));
        }
        out
    }
}

/// Symmetry-reduced rate solver for one parameter set.
pub struct RateSolver {
    pub params: SystemParams,
    pub liouvillian: Liouvillian,
    basis: &'static IrrepDMBasis,
    subspaces: Vec<Vec<usize>>,
    splits: Vec<OnceLock<(Array2<C64>, NullSplit)>>,
}

impl RateSolver {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate_with(crate::model::HARD_SEPARATION)?;
        Ok(RateSolver {
            params: *params,
            liouvillian: liouvillian(params)?,
            basis: irrep_basis(params.n_atoms),
            subspaces: product_subspaces(params.n_atoms),
            splits: (0..=params.n_atoms).map(|_| OnceLock::new()).collect(),
        })
    }

    fn levels(&self) -> usize {
        self.params.n_atoms + 1
    }

    fn hilbert(&self) -> usize {
        hilbert_dim(self.params.n_atoms)
    }

    /// Null space of L0 on the symmetric sector of R_ii.
    fn diagonal_split(&self, i: usize) -> Result<&(Array2<C64>, NullSplit)> {
        if let Some(s) = self.splits[i].get() {
            return Ok(s);
        }
        let m = reduce_operator(&self.liouvillian.unperturbed, self.basis.symmetric(i, i));
        let split = NullSplit::new(m.view())?;
        split.require_nullity(1)?;
        Ok(self.splits[i].get_or_init(|| (m, split)))
    }

    pub fn quasisteady_state(&self, i: usize) -> Result<QuasisteadyState> {
        if i >= self.levels() {
            return Err(Error::Parameter(format!("subspace {i} out of range")));
        }
        let (_, split) = self.diagonal_split(i)?;
        let sector = self.basis.symmetric(i, i);
        let rho = unvectorize(&sector.basis.dot(&split.right.column(0)), self.hilbert());
        let rho = hermitize_normalize(&rho)?;
        let l0 = &self.liouvillian.unperturbed;
        let res = frobenius(&l0.apply(&rho));
        if res > 1e-10 * frobenius(&l0.matrix) * frobenius(&rho) {
            return Err(Error::Solver(format!("quasisteady residual {res:.3e} in subspace {i}")));
        }
        Ok(QuasisteadyState { subspace: i, rho })
    }

    pub fn quasisteady_states(&self) -> Result<Vec<QuasisteadyState>> {
        (0..self.levels()).map(|i| self.quasisteady_state(i)).collect()
    }

    /// Left null vectors of L0, biorthonormal to `states`.
    pub fn dual_states(&self, states: &[QuasisteadyState]) -> Result<Vec<DualState>> {
        let raw: Vec<Array2<C64>> = (0..self.levels())
            .map(|j| {
                let (_, split) = self.diagonal_split(j)?;
                let sector = self.basis.symmetric(j, j);
                Ok(unvectorize(&sector.basis.dot(&split.left.column(0)), self.hilbert()))
            })
            .collect::<Result<_>>()?;
        biorthonormalize(raw, states)
    }

    /// Transition rates, dispatching on the scheme.
    pub fn transition_rates(&self) -> Result<RateSet> {
        match self.params.scheme {
            LevelScheme::V => self.transition_rates_v(),
            LevelScheme::D => self.transition_rates_d(),
        }
    }

    /// First-order correction ρ⁽¹⁾ solving L0 ρ⁽¹⁾ = −L1 ρ_ss,i outside the
    /// null space.
    pub fn first_order_correction(&self, state: &QuasisteadyState, duals: &[DualState]) -> Result<Array2<C64>> {
        let i = state.subspace;
        let rhs = -self.liouvillian.perturbation.apply_vec(&vectorize(&state.rho));
        let rn = norm(&rhs);
        let null_part: f64 = duals.iter().map(|d| hs_inner_vec(&d.rho, &rhs).norm()).sum();
        if null_part > 1e-8 * rn.max(f64::MIN_POSITIVE) {
            return Err(Error::ModelAssumption(format!(
                "perturbation has a null-space component {null_part:.3e} (|rhs| = {rn:.3e})"
            )));
        }
        let d2 = rhs.len();
        let mut x = Array1::<C64>::zeros(d2);
        let mut covered = Array1::<C64>::zeros(d2);
        for k in [i.wrapping_sub(1), i + 1] {
            if k >= self.levels() {
                continue;
            }
            for block in [(i, k), (k, i)] {
                let sector = self.basis.symmetric(block.0, block.1);
                let b = &sector.basis;
                let coords = dagger(b).dot(&rhs);
                covered = covered + b.dot(&coords);
                let m = reduce_operator(&self.liouvillian.unperturbed, sector);
                let split = NullSplit::new(m.view())?;
                let (y, rel) = restricted_solve(&m, &split, &coords)?;
                if rel > SOLVE_TOLERANCE {
                    return Err(Error::Solver(format!("restricted solve residual {rel:.3e} in block R{}{}", block.0, block.1)));
                }
                x = x + b.dot(&y);
            }
        }
        let missed = norm(&(&rhs - &covered));
        if missed > 1e-8 * rn {
            return Err(Error::ModelAssumption(format!(
                "perturbation leaves the neighbouring symmetric sectors (residual {missed:.3e})"
            )));
        }
        Ok(unvectorize(&x, self.hilbert()))
    }

    /// Rates from d/dt of the subspace populations at ρ_ss,i + ρ⁽¹⁾.
    pub fn transition_rates_v(&self) -> Result<RateSet> {
        let states = self.quasisteady_states()?;
        let duals = self.dual_states(&states)?;
        let n = self.levels();
        let mut p = Array2::zeros((n, n));
        for s in &states {
            let rho = &s.rho + &self.first_order_correction(s, &duals)?;
            let lr = self.liouvillian.full.apply(&rho);
            for j in 0..n {
                if j != s.subspace {
                    p[[s.subspace, j]] = diagonal_sum(&lr, &self.subspaces[j]).re;
                }
            }
        }
        Ok(RateSet::new(p))
    }

    /// The same rates from the coherences, 2 Σ Im(H1_xy ρ_yx) over x ∈ S_j,
    /// y ∉ S_j, evaluated in the Dicke basis.
    pub fn coherence_rates_v(&self) -> Result<RateSet> {
        let states = self.quasisteady_states()?;
        let duals = self.dual_states(&states)?;
        let u = &build_dicke_basis(self.params.n_atoms).unitary;
        let h1 = crate::operators::conditional_hamiltonian(&self.params)?
            - crate::operators::conditional_hamiltonian(&self.params.unperturbed())?;
        let h1d = dagger(u).dot(&h1).dot(u);
        let part = crate::symmetry::subspace_partition(&build_dicke_basis(self.params.n_atoms));
        let n = self.levels();
        let mut p = Array2::zeros((n, n));
        for s in &states {
            let rho = &s.rho + &self.first_order_correction(s, &duals)?;
            let rd = dagger(u).dot(&rho).dot(u);
            for j in 0..n {
                if j == s.subspace {
                    continue;
                }
                let mut z = C64::new(0.0, 0.0);
                for &x in &part.sets[j] {
                    for y in 0..rd.nrows() {
                        if !part.sets[j].contains(&y) {
                            z += h1d[[x, y]] * rd[[y, x]];
                        }
                    }
                }
                p[[s.subspace, j]] = 2.0 * z.im;
            }
        }
        Ok(RateSet::new(p))
    }

    /// Rates as the dual-state coefficients of L1 ρ_ss,i. The neglected
    /// resolvent term is evaluated and reported in `resolvent_norm`.
    pub fn transition_rates_d(&self) -> Result<RateSet> {
        let states = self.quasisteady_states()?;
        let duals = self.dual_states(&states)?;
        let n = self.levels();
        let mut alpha = Array2::<C64>::zeros((n, n));
        let mut worst = 0.0f64;
        for s in &states {
            let l1rho = self.liouvillian.perturbation.apply(&s.rho);
            for d in &duals {
                alpha[[s.subspace, d.subspace]] = hs_inner(&d.rho, &l1rho);
            }
            let mut tilde = l1rho.clone();
            for t in &states {
                tilde = tilde - t.rho.mapv(|z| z * alpha[[s.subspace, t.subspace]]);
            }
            worst = worst.max(self.resolvent_norm(&tilde)?);
        }
        log::debug!("neglected resolvent correction norm {worst:.3e}");
        let mut p = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    p[[i, j]] = alpha[[i, j]].re;
                }
            }
        }
        Ok(RateSet { p, resolvent_norm: Some(worst) })
    }

    /// ‖L0⁻¹ ρ̃‖ on the complement of the null space, summed over the
    /// diagonal symmetric sectors that ρ̃ occupies.
    fn resolvent_norm(&self, tilde: &Array2<C64>) -> Result<f64> {
        let v = vectorize(tilde);
        let mut total = Array1::<C64>::zeros(v.len());
        for k in 0..self.levels() {
            let sector = self.basis.symmetric(k, k);
            let coords = dagger(&sector.basis).dot(&v);
            if norm(&coords) == 0.0 {
                continue;
            }
            let (m, split) = self.diagonal_split(k)?;
            let (y, _) = restricted_solve(m, split, &coords)?;
            total = total + sector.basis.dot(&y);
        }
        Ok(norm(&total))
    }
}

fn hs_inner_vec(a: &Array2<C64>, v: &Array1<C64>) -> C64 {
    let av = vectorize(a);
    av.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
}

/// Rescale dual candidates so that Tr(dual_j† ρ_i) = δ_ij.
pub(crate) fn biorthonormalize(raw: Vec<Array2<C64>>, states: &[QuasisteadyState]) -> Result<Vec<DualState>> {
    use ndarray_linalg::{Inverse, SVD};
    let n = raw.len();
    if n != states.len() {
        return Err(Error::Degeneracy { expected: states.len(), found: n, singular_values: vec![] });
    }
    let mut g = Array2::<C64>::zeros((n, n));
    for (k, d) in raw.iter().enumerate() {
        for (i, s) in states.iter().enumerate() {
            g[[k, i]] = hs_inner(d, &s.rho);
        }
    }
    let (_, sv, _) = g.svd(false, false)?;
    let cond = sv[0] / sv[n - 1];
    if !(cond <= 1e8) {
        return Err(Error::Conditioning(cond));
    }
    let ginv = g.inv()?;
    Ok((0..n)
        .map(|j| {
            let mut rho = Array2::<C64>::zeros(raw[0].raw_dim());
            for (k, d) in raw.iter().enumerate() {
                rho = rho + d.mapv(|z| z * ginv[[j, k]].conj());
            }
            DualState { subspace: states[j].subspace, rho }
        })
        .collect())
}

pub fn quasisteady_state(p: &SystemParams, i: usize) -> Result<QuasisteadyState> {
    RateSolver::new(p)?.quasisteady_state(i)
}

pub fn dual_states(p: &SystemParams) -> Result<Vec<DualState>> {
    let s = RateSolver::new(p)?;
    let states = s.quasisteady_states()?;
    s.dual_states(&states)
}

pub fn transition_rates_v(p: &SystemParams) -> Result<RateSet> {
    if p.scheme != LevelScheme::V {
        return Err(Error::Parameter("V-scheme rates requested for a D-scheme configuration".into()));
    }
    RateSolver::new(p)?.transition_rates_v()
}

pub fn transition_rates_d(p: &SystemParams) -> Result<RateSet> {
    if p.scheme != LevelScheme::D {
        return Err(Error::Parameter("D-scheme rates requested for a V-scheme configuration".into()));
    }
    RateSolver::new(p)?.transition_rates_d()
}

/// Numerically exact rates for either scheme.
pub fn transition_rates(p: &SystemParams) -> Result<RateSet> {
    RateSolver::new(p)?.transition_rates()
}
