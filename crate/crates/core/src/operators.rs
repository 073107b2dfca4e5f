//! Transition operators, the conditional Hamiltonian, collective jump
//! channels and the Liouvillian.
//!
//! Product basis: atom 1 is the slowest index, single-atom levels are
//! ordered |1>, |2>, |3>. Density matrices are vectorized by stacking
//! columns, so vec(A X B) = (Bᵀ ⊗ A) vec(X).

use std::io::{Read, Write};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{dagger, identity, kron, unvectorize, vectorize, C64, ONE, ZERO};
use crate::model::SystemParams;

/// Hilbert space dimension for `n` atoms.
pub fn hilbert_dim(n: usize) -> usize {
    3usize.pow(n as u32)
}

/// Single-atom levels (0-based) of product basis state `idx`, atom 1 first.
pub fn levels_of(idx: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut rest = idx;
    for k in (0..n).rev() {
        out[k] = rest % 3;
        rest /= 3;
    }
    out
}

/// Product basis index of the given 0-based single-atom levels.
pub fn index_of(levels: &[usize]) -> usize {
    levels.iter().fold(0, |acc, &l| acc * 3 + l)
}

/// Upper and lower level (0-based) of transition `j`.
pub fn transition_levels(j: usize) -> (usize, usize) {
    match j {
        1 => (1, 0),
        2 => (2, 1),
        3 => (2, 0),
        _ => panic!("transition index {j} out of range"),
    }
}

fn single_raising(j: usize) -> Array2<C64> {
    let (up, low) = transition_levels(j);
    let mut m = Array2::zeros((3, 3));
    m[[up, low]] = ONE;
    m
}

fn embed(single: &Array2<C64>, atom: usize, n: usize) -> Array2<C64> {
    let mut out = Array2::from_elem((1, 1), ONE);
    for k in 0..n {
        out = if k == atom { kron(&out, single) } else { kron(&out, &identity(3)) };
    }
    out
}

/// The operators S_ij^± for every atom i and transition j.
#[derive(Debug, Clone)]
pub struct TransitionOperators {
    pub n_atoms: usize,
    raising: Vec<[Array2<C64>; 3]>,
}

impl TransitionOperators {
    /// S_ij^+ for atom `i` (0-based) and transition `j` (1..=3).
    pub fn raising(&self, i: usize, j: usize) -> &Array2<C64> {
        &self.raising[i][j - 1]
    }

    /// S_ij^-.
    pub fn lowering(&self, i: usize, j: usize) -> Array2<C64> {
        dagger(self.raising(i, j))
    }
}

pub fn transition_operators(n_atoms: usize) -> TransitionOperators {
    assert!((1..=3).contains(&n_atoms), "n_atoms must be 1, 2 or 3");
    let raising = (0..n_atoms)
        .map(|i| [1, 2, 3].map(|j| embed(&single_raising(j), i, n_atoms)))
        .collect();
    TransitionOperators { n_atoms, raising }
}

/// Conditional (no-jump) Hamiltonian with ħ = 1.
pub fn conditional_hamiltonian(p: &SystemParams) -> Result<Array2<C64>> {
    check_scheme(p)?;
    let ops = transition_operators(p.n_atoms);
    let n = p.n_atoms;
    let d = hilbert_dim(n);
    let half_i = C64::new(0.0, -0.5); // 1/(2i)
    let mut h = Array2::zeros((d, d));
    for i in 0..n {
        for j in 1..=3 {
            let a = p.a_j(j);
            if a != 0.0 {
                let sp = ops.raising(i, j);
                h = h + sp.dot(&dagger(sp)).mapv(|z| z * half_i * a);
            }
        }
        // The weak drive sits on |1>↔|2>, the strong one on |1>↔|3>.
        for (j, om) in [(1, p.omega2), (3, p.omega3)] {
            if om != 0.0 {
                let sp = ops.raising(i, j);
                h = h + (sp + &dagger(sp)).mapv(|z| z * 0.5 * om);
            }
        }
    }
    for j in 1..=3 {
        let c = p.c_j(j);
        if c == ZERO {
            continue;
        }
        for k in 0..n {
            for l in k + 1..n {
                let (sk, sl) = (ops.raising(k, j), ops.raising(l, j));
                let pair = sk.dot(&dagger(sl)) + sl.dot(&dagger(sk));
                h = h + pair.mapv(|z| z * half_i * c);
            }
        }
    }
    Ok(h)
}

fn check_scheme(p: &SystemParams) -> Result<()> {
    use crate::model::LevelScheme;
    if !(1..=3).contains(&p.n_atoms) {
        return Err(Error::Parameter(format!("n_atoms must be 1, 2 or 3, got {}", p.n_atoms)));
    }
    let zero = ZERO;
    match p.scheme {
        LevelScheme::D if p.omega2 != 0.0 => Err(Error::Parameter("Omega2 must vanish in the D scheme".into())),
        LevelScheme::V if p.a[0] != 0.0 || p.a[1] != 0.0 || p.c[0] != zero || p.c[1] != zero => {
            Err(Error::Parameter("A1, A2, C1, C2 must vanish in the V scheme".into()))
        }
        _ => Ok(()),
    }
}

/// One term rate·R ρ R† of the reset map.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    /// Transition (1..=3) whose photons this channel emits.
    pub transition: usize,
    pub rate: f64,
    pub op: Array2<C64>,
}

/// Collective jump channels: symmetric first, then the orthogonal
/// combinations. Channels with zero rate are omitted.
pub fn jump_channels(p: &SystemParams) -> Result<Vec<JumpChannel>> {
    check_scheme(p)?;
    let ops = transition_operators(p.n_atoms);
    let n = p.n_atoms;
    let weights: Vec<Vec<f64>> = match n {
        1 => vec![vec![1.0]],
        2 => {
            let h = 0.5f64.sqrt();
            vec![vec![h, h], vec![h, -h]]
        }
        _ => {
            let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / 6f64.sqrt(), 0.5f64.sqrt());
            vec![vec![a, a, a], vec![2.0 * b, -b, -b], vec![0.0, c, -c]]
        }
    };
    let mut out = Vec::new();
    for j in 1..=3 {
        if !p.is_active(j) {
            continue;
        }
        let rates = p.collective_rates(j);
        let tol = 1e-12 * p.a_j(j).max(p.c_j(j).norm());
        for (w, rate) in weights.iter().zip(rates) {
            if rate < -tol {
                return Err(Error::Unphysical(format!("collective rate {rate:.6e} of transition {j} is negative")));
            }
            let rate = rate.max(0.0);
            if rate == 0.0 {
                continue;
            }
            let d = hilbert_dim(n);
            let mut op = Array2::zeros((d, d));
            for (i, &wi) in w.iter().enumerate() {
                if wi != 0.0 {
                    op = op + ops.lowering(i, j).mapv(|z| z * wi);
                }
            }
            out.push(JumpChannel { transition: j, rate, op });
        }
    }
    Ok(out)
}

/// Independent single-atom channels A_j S_ij⁻, atom-major. Only equivalent
/// to [`jump_channels`] when every coupling constant vanishes.
pub fn single_atom_channels(p: &SystemParams) -> Result<Vec<JumpChannel>> {
    check_scheme(p)?;
    if p.c.iter().any(|&c| c != ZERO) {
        return Err(Error::Parameter("single-atom channels require C = 0".into()));
    }
    let ops = transition_operators(p.n_atoms);
    let mut out = Vec::new();
    for i in 0..p.n_atoms {
        for j in 1..=3 {
            if p.a_j(j) > 0.0 {
                out.push(JumpChannel { transition: j, rate: p.a_j(j), op: ops.lowering(i, j) });
            }
        }
    }
    Ok(out)
}

/// Convention tag of the binary dump.
pub const DUMP_TAG: &[u8; 8] = b"COLSTACK";

/// A superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub n_atoms: usize,
    pub matrix: Array2<C64>,
}

impl Superoperator {
    /// −i(Hρ − ρH†) + Σ rate·RρR†.
    pub fn from_generator(n_atoms: usize, h: &Array2<C64>, channels: &[JumpChannel]) -> Self {
        let d = hilbert_dim(n_atoms);
        let nonzero = |a: &Array2<C64>| -> Vec<(usize, usize, C64)> {
            a.indexed_iter().filter(|(_, z)| z.norm() != 0.0).map(|((r, c), z)| (r, c, *z)).collect()
        };
        let mi = C64::new(0.0, -1.0);
        let mut m = Array2::<C64>::zeros((d * d, d * d));
        // −i (I⊗H − H̄⊗I) for column stacking.
        for (r, c, z) in nonzero(h) {
            for a in 0..d {
                m[[a * d + r, a * d + c]] += mi * z;
                m[[r * d + a, c * d + a]] -= mi * z.conj();
            }
        }
        for ch in channels {
            let nz = nonzero(&ch.op);
            for &(r1, c1, z1) in &nz {
                for &(r2, c2, z2) in &nz {
                    m[[r1 * d + r2, c1 * d + c2]] += z1.conj() * z2 * ch.rate;
                }
            }
        }
        Superoperator { n_atoms, matrix: m }
    }

    pub fn identity(n_atoms: usize) -> Self {
        let d = hilbert_dim(n_atoms);
        Superoperator { n_atoms, matrix: identity(d * d) }
    }

    /// Dimension of the vectorized space, 9^n.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hilbert_dim(&self) -> usize {
        hilbert_dim(self.n_atoms)
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        unvectorize(&self.apply_vec(&vectorize(rho)), self.hilbert_dim())
    }

    pub fn apply_vec(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }

    /// Binary dump: u64 dimension and an 8-byte convention tag, then the
    /// entries row-major as little-endian (re, im) f64 pairs.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.dim() as u64).to_le_bytes())?;
        w.write_all(DUMP_TAG)?;
        for z in self.matrix.iter() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 16];
        r.read_exact(&mut head)?;
        let dim = u64::from_le_bytes(head[..8].try_into().unwrap()) as usize;
        if &head[8..] != DUMP_TAG {
            return Err(Error::Config("unknown superoperator dump convention".into()));
        }
        let n_atoms = match dim {
            9 => 1,
            81 => 2,
            729 => 3,
            _ => return Err(Error::Config(format!("unsupported dump dimension {dim}"))),
        };
        let mut buf = vec![0u8; dim * dim * 16];
        r.read_exact(&mut buf)?;
        let vals: Vec<C64> = buf
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let matrix = Array2::from_shape_vec((dim, dim), vals).expect("dump size");
        Ok(Superoperator { n_atoms, matrix })
    }
}

/// L together with its split L = L0 + L1.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub full: Superoperator,
    pub unperturbed: Superoperator,
    pub perturbation: Superoperator,
}

pub fn generator(p: &SystemParams) -> Result<Superoperator> {
    let h = conditional_hamiltonian(p)?;
    let ch = jump_channels(p)?;
    Ok(Superoperator::from_generator(p.n_atoms, &h, &ch))
}

pub fn liouvillian(p: &SystemParams) -> Result<Liouvillian> {
    let full = generator(p)?;
    let unperturbed = generator(&p.unperturbed())?;
    let perturbation = Superoperator {
        n_atoms: p.n_atoms,
        matrix: &full.matrix - &unperturbed.matrix,
    };
    Ok(Liouvillian { full, unperturbed, perturbation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom_raising_has_one_entry() {
        let ops = transition_operators(1);
        let s = ops.raising(0, 1);
        assert_eq!(s[[1, 0]], ONE);
        assert_eq!(s.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..27 {
            assert_eq!(index_of(&levels_of(idx, 3)), idx);
        }
        assert_eq!(index_of(&[1, 0, 0]), 9);
    }

    #[test]
    fn dump_round_trip() {
        let p = crate::model::SystemParams::v(2.0, 1.0, 0.01).with_n_atoms(1);
        let l = generator(&p).unwrap();
        let mut buf = Vec::new();
        l.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 81 * 16);
        let back = Superoperator::read_dump(&buf[..]).unwrap();
        assert_eq!(back, l);
    }
}
