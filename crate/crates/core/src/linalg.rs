//! Small dense linear algebra helpers on top of ndarray-linalg.

use ndarray::{s, Array1, Array2, ArrayView2};
use ndarray_linalg::{JobSvd, SVDDC, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative singular value threshold separating the null space.
pub const NULL_THRESHOLD: f64 = 1e-10;

/// Column-stacking vectorization: element (r, c) goes to index c·d + r.
pub fn vectorize(x: &Array2<C64>) -> Array1<C64> {
    x.t().iter().copied().collect()
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    let mut x = Array2::zeros((d, d));
    for c in 0..d {
        for r in 0..d {
            x[[r, c]] = v[c * d + r];
        }
    }
    x
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Hilbert-Schmidt inner product Tr(a† b).
pub fn hs_inner(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Singular value decomposition split at the null-space threshold.
pub struct NullSplit {
    pub singular_values: Array1<f64>,
    /// Right null vectors as columns.
    pub right: Array2<C64>,
    /// Left null vectors as columns (u with u† M = 0).
    pub left: Array2<C64>,
    u: Array2<C64>,
    vt: Array2<C64>,
    rank: usize,
}

impl NullSplit {
    pub fn new(m: ArrayView2<C64>) -> Result<Self> {
        let n = m.nrows();
        assert_eq!(n, m.ncols(), "null space of a non-square matrix");
        if n == 0 {
            return Ok(NullSplit {
                singular_values: Array1::zeros(0),
                right: Array2::zeros((0, 0)),
                left: Array2::zeros((0, 0)),
                u: Array2::zeros((0, 0)),
                vt: Array2::zeros((0, 0)),
                rank: 0,
            });
        }
        let (u, sv, vt) = m.to_owned().svddc(JobSvd::All)?;
        let (u, vt) = (u.unwrap(), vt.unwrap());
        let smax = sv[0];
        let rank = sv.iter().filter(|&&x| x > NULL_THRESHOLD * smax && x > 0.0).count();
        let right = dagger(&vt.slice(s![rank.., ..]).to_owned());
        let left = u.slice(s![.., rank..]).to_owned();
        Ok(NullSplit { singular_values: sv, right, left, u, vt, rank })
    }

    pub fn nullity(&self) -> usize {
        self.right.ncols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The smallest singular values, for diagnostics.
    pub fn tail(&self, k: usize) -> Vec<f64> {
        let n = self.singular_values.len();
        self.singular_values.slice(s![n.saturating_sub(k)..]).to_vec()
    }

    /// Minimum-norm solution restricted to the range: V Σ⁺ U† b.
    pub fn pseudo_solve(&self, b: &Array1<C64>) -> Array1<C64> {
        let r = self.rank;
        let ub = self.u.slice(s![.., ..r]).t().mapv(|z| z.conj()).dot(b);
        let scaled: Array1<C64> = ub
            .iter()
            .zip(self.singular_values.iter())
            .map(|(x, &s)| x / s)
            .collect();
        self.vt.slice(s![..r, ..]).t().mapv(|z| z.conj()).dot(&scaled)
    }

    pub fn require_nullity(&self, expected: usize) -> Result<()> {
        if self.nullity() != expected {
            return Err(Error::Degeneracy {
                expected,
                found: self.nullity(),
                singular_values: self.tail(expected + 2),
            });
        }
        Ok(())
    }
}

/// Spectral projector onto the null space along the range, built from
/// right null vectors `r` and left null vectors `l` of equal count.
pub fn null_projector(r: &Array2<C64>, l: &Array2<C64>) -> Result<Array2<C64>> {
    if r.ncols() == 0 {
        return Ok(Array2::zeros((r.nrows(), r.nrows())));
    }
    use ndarray_linalg::Inverse;
    let gram = dagger(l).dot(r);
    let ginv = gram.inv().map_err(|e| Error::Solver(format!("null-space Gram inverse: {e}")))?;
    Ok(r.dot(&ginv).dot(&dagger(l)))
}

/// Solve M x = b for x in the complement of the null space, removing any
/// null-space component of the pseudo-inverse solution along the spectral
/// projector. Returns x and the relative residual ‖Mx − b‖/‖b‖.
pub fn restricted_solve(m: &Array2<C64>, split: &NullSplit, b: &Array1<C64>) -> Result<(Array1<C64>, f64)> {
    let mut x = split.pseudo_solve(b);
    if split.nullity() > 0 {
        let pr = null_projector(&split.right, &split.left)?;
        x = &x - &pr.dot(&x);
    }
    let res = &m.dot(&x) - b;
    let bn = norm(b);
    let rel = if bn == 0.0 { norm(&res) } else { norm(&res) / bn };
    Ok((x, rel))
}

/// Orthonormal basis (columns) of the column span of `a`, using the
/// singular values above `rel_tol`·σmax.
pub fn orthonormal_span(a: &Array2<C64>, rel_tol: f64) -> Result<Array2<C64>> {
    if a.ncols() == 0 {
        return Ok(a.clone());
    }
    let (u, sv, _) = a.svd(true, false)?;
    let u = u.unwrap();
    let smax = sv.get(0).copied().unwrap_or(0.0);
    let k = sv.iter().filter(|&&x| smax > 0.0 && x > rel_tol * smax).count();
    Ok(u.slice(s![.., ..k]).to_owned())
}

/// Hermitize and normalize to unit trace.
pub fn hermitize_normalize(x: &Array2<C64>) -> Result<Array2<C64>> {
    let h = (x + &dagger(x)).mapv(|z| z * 0.5);
    let tr = trace(&h).re;
    if tr.abs() < 1e-300 {
        return Err(Error::Solver("null vector has vanishing trace".into()));
    }
    Ok(h.mapv(|z| z / tr))
}

/// Sum of the diagonal entries of `x` at the given indices.
pub fn diagonal_sum(x: &Array2<C64>, idx: &[usize]) -> C64 {
    idx.iter().map(|&i| x[[i, i]]).sum()
}

