//! Rates from a single SVD of L0 in the full 9^n space, without the
//! symmetry-adapted basis. Serves as an oracle for the reduced solver.
//!
//! The full null space of L0 is degenerate: apart from the symmetric
//! quasisteady states it contains states that are not permutation
//! invariant. The symmetric one is selected by projecting onto the block
//! and averaging over atom permutations.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{
    dagger, diagonal_sum, hermitize_normalize, hs_inner, norm, null_projector, orthonormal_span, unvectorize,
    vectorize, NullSplit, C64,
};
use crate::model::{LevelScheme, SystemParams};
use crate::operators::{hilbert_dim, liouvillian, Liouvillian};
use crate::symmetry::{product_subspace, product_subspaces, symmetrize};

use super::{biorthonormalize, DualState, QuasisteadyState, RateSet, SOLVE_TOLERANCE};

pub struct FullSolver {
    pub params: SystemParams,
    pub liouvillian: Liouvillian,
    split: NullSplit,
    projector: Array2<C64>,
}

impl FullSolver {
    /// Performs the SVD of L0; a few seconds for three atoms.
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate_with(crate::model::HARD_SEPARATION)?;
        let liouvillian = liouvillian(params)?;
        let split = NullSplit::new(liouvillian.unperturbed.matrix.view())?;
        let projector = null_projector(&split.right, &split.left)?;
        Ok(FullSolver { params: *params, liouvillian, split, projector })
    }

    pub fn nullity(&self) -> usize {
        self.split.nullity()
    }

    fn hilbert(&self) -> usize {
        hilbert_dim(self.params.n_atoms)
    }

    /// The symmetric member of the null vectors supported on R_ii.
    fn symmetric_null(&self, vectors: &Array2<C64>, i: usize) -> Result<Array2<C64>> {
        let d = self.hilbert();
        let n = self.params.n_atoms;
        let mut cands = Array2::<C64>::zeros((d * d, vectors.ncols()));
        for k in 0..vectors.ncols() {
            let mut m = unvectorize(&vectors.column(k).to_owned(), d);
            for r in 0..d {
                for c in 0..d {
                    if product_subspace(r, n) != i || product_subspace(c, n) != i {
                        m[[r, c]] = C64::new(0.0, 0.0);
                    }
                }
            }
            cands.column_mut(k).assign(&vectorize(&symmetrize(&m, n)));
        }
        let span = orthonormal_span(&cands, 1e-8)?;
        if span.ncols() != 1 {
            return Err(Error::Degeneracy { expected: 1, found: span.ncols(), singular_values: vec![] });
        }
        Ok(unvectorize(&span.column(0).to_owned(), d))
    }

    pub fn quasisteady_states(&self) -> Result<Vec<QuasisteadyState>> {
        (0..=self.params.n_atoms)
            .map(|i| {
                let rho = hermitize_normalize(&self.symmetric_null(&self.split.right, i)?)?;
                Ok(QuasisteadyState { subspace: i, rho })
            })
            .collect()
    }

    pub fn dual_states(&self, states: &[QuasisteadyState]) -> Result<Vec<DualState>> {
        let raw = (0..=self.params.n_atoms)
            .map(|j| self.symmetric_null(&self.split.left, j))
            .collect::<Result<Vec<_>>>()?;
        biorthonormalize(raw, states)
    }

    /// Solve L0 x = b on the complement of the null space.
    pub fn resolve(&self, b: &Array1<C64>) -> Result<Array1<C64>> {
        let x = self.split.pseudo_solve(b);
        let x = &x - &self.projector.dot(&x);
        let res = norm(&(&self.liouvillian.unperturbed.apply_vec(&x) - b));
        let bn = norm(b);
        if res > SOLVE_TOLERANCE * bn {
            return Err(Error::Solver(format!("full-space residual {:.3e}", res / bn)));
        }
        Ok(x)
    }

    pub fn transition_rates(&self) -> Result<RateSet> {
        let states = self.quasisteady_states()?;
        let duals = self.dual_states(&states)?;
        let levels = self.params.n_atoms + 1;
        let mut p = Array2::zeros((levels, levels));
        match self.params.scheme {
            LevelScheme::V => {
                let subspaces = product_subspaces(self.params.n_atoms);
                let left = dagger(&self.split.left);
                for s in &states {
                    let b = -self.liouvillian.perturbation.apply_vec(&vectorize(&s.rho));
                    let null_part = norm(&left.dot(&b));
                    if null_part > 1e-8 * norm(&b) {
                        return Err(Error::ModelAssumption(format!("null-space component {null_part:.3e}")));
                    }
                    let rho1 = unvectorize(&self.resolve(&b)?, self.hilbert());
                    let lr = self.liouvillian.full.apply(&(&s.rho + &rho1));
                    for j in 0..levels {
                        if j != s.subspace {
                            p[[s.subspace, j]] = diagonal_sum(&lr, &subspaces[j]).re;
                        }
                    }
                }
            }
            LevelScheme::D => {
                for s in &states {
                    let l1rho = self.liouvillian.perturbation.apply(&s.rho);
                    for d in &duals {
                        if d.subspace != s.subspace {
                            p[[s.subspace, d.subspace]] = hs_inner(&d.rho, &l1rho).re;
                        }
                    }
                }
            }
        }
        Ok(RateSet::new(p))
    }
}

/// Full-space rates for one parameter set.
pub fn transition_rates_full(p: &SystemParams) -> Result<RateSet> {
    FullSolver::new(p)?.transition_rates()
}
