//! Permutation-adapted (Dicke) basis, the intensity subspaces and the
//! irrep decomposition of density-matrix space.
//!
//! The subspace S_i holds the states with exactly i atoms in the bright
//! manifold {|1>, |3>}, i.e. n − i atoms shelved in |2>.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use crate::linalg::{C64, ONE};
use crate::operators::{hilbert_dim, index_of, levels_of, Superoperator};

/// Irreducible representation of the permutation group a basis state
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irrep {
    Trivial,
    Sign,
    /// Member of a two-dimensional copy; see [`DickeBasis::pairs`].
    Standard,
}

#[derive(Debug, Clone)]
pub struct DickeState {
    pub label: String,
    pub subspace: usize,
    pub irrep: Irrep,
    /// Real coefficients in the product basis.
    pub vector: Array1<f64>,
}

/// A copy of the two-dimensional irrep as an ordered pair of signed basis
/// states. All pairs transform with the same 2×2 matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardPair {
    pub first: (usize, f64),
    pub second: (usize, f64),
}

#[derive(Debug, Clone)]
pub struct DickeBasis {
    pub n_atoms: usize,
    pub states: Vec<DickeState>,
    pub pairs: Vec<StandardPair>,
    /// Columns are the basis vectors in the product basis.
    pub unitary: Array2<C64>,
}

impl DickeBasis {
    pub fn index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label)
    }

    pub fn vector(&self, label: &str) -> &Array1<f64> {
        &self.states[self.index(label).unwrap_or_else(|| panic!("no Dicke state {label}"))].vector
    }

    fn pairs_in(&self, subspace: usize) -> Vec<StandardPair> {
        self.pairs
            .iter()
            .copied()
            .filter(|p| self.states[p.first.0].subspace == subspace)
            .collect()
    }

    fn of_irrep(&self, subspace: usize, irrep: Irrep) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&k| self.states[k].subspace == subspace && self.states[k].irrep == irrep)
            .collect()
    }
}

type Term = (f64, [usize; 3]);

/// Builds a product-basis vector from 1-based level triples.
fn ket3(terms: &[Term], norm: f64) -> Array1<f64> {
    let mut v = Array1::zeros(27);
    for &(c, l) in terms {
        v[index_of(&[l[0] - 1, l[1] - 1, l[2] - 1])] += c * norm;
    }
    v
}

fn ket(n: usize, terms: &[(f64, &[usize])], norm: f64) -> Array1<f64> {
    let mut v = Array1::zeros(hilbert_dim(n));
    for &(c, l) in terms {
        let l0: Vec<usize> = l.iter().map(|x| x - 1).collect();
        v[index_of(&l0)] += c * norm;
    }
    v
}

/// Bright-atom count of a product basis state.
pub fn product_subspace(idx: usize, n: usize) -> usize {
    levels_of(idx, n).iter().filter(|&&l| l != 1).count()
}

/// Product basis indices of each subspace S_0..S_n.
pub fn product_subspaces(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n + 1];
    for idx in 0..hilbert_dim(n) {
        out[product_subspace(idx, n)].push(idx);
    }
    out
}

/// The Dicke basis of `n` atoms, grouped by subspace in listing order.
pub fn build_dicke_basis(n: usize) -> DickeBasis {
    let mut states = Vec::new();
    let mut pairs = Vec::new();
    let push = |states: &mut Vec<DickeState>, label: String, subspace, irrep, vector| {
        states.push(DickeState { label, subspace, irrep, vector });
        states.len() - 1
    };
    match n {
        1 => {
            for (label, l, sub) in [("2", 2, 0), ("1", 1, 1), ("3", 3, 1)] {
                push(&mut states, label.into(), sub, Irrep::Trivial, ket(1, &[(1.0, &[l])], 1.0));
            }
        }
        2 => {
            let h = 0.5f64.sqrt();
            push(&mut states, "e2".into(), 0, Irrep::Trivial, ket(2, &[(1.0, &[2, 2])], 1.0));
            for (i, sub) in [(1, 1), (3, 1)] {
                let s = ket(2, &[(1.0, &[i, 2]), (1.0, &[2, i])], h);
                let a = ket(2, &[(1.0, &[i, 2]), (-1.0, &[2, i])], h);
                push(&mut states, format!("s{i}2"), sub, Irrep::Trivial, s);
                push(&mut states, format!("a{i}2"), sub, Irrep::Sign, a);
            }
            push(&mut states, "g".into(), 2, Irrep::Trivial, ket(2, &[(1.0, &[1, 1])], 1.0));
            push(&mut states, "s13".into(), 2, Irrep::Trivial, ket(2, &[(1.0, &[1, 3]), (1.0, &[3, 1])], h));
            push(&mut states, "a13".into(), 2, Irrep::Sign, ket(2, &[(1.0, &[1, 3]), (-1.0, &[3, 1])], h));
            push(&mut states, "e3".into(), 2, Irrep::Trivial, ket(2, &[(1.0, &[3, 3])], 1.0));
        }
        3 => {
            let ijj = |states: &mut Vec<DickeState>, pairs: &mut Vec<StandardPair>, i: usize, j: usize, sub| {
                let s = ket3(&[(1.0, [i, j, j]), (1.0, [j, j, i]), (1.0, [j, i, j])], 1.0 / 3f64.sqrt());
                let b = ket3(&[(2.0, [i, j, j]), (-1.0, [j, j, i]), (-1.0, [j, i, j])], 1.0 / 6f64.sqrt());
                let c = ket3(&[(1.0, [j, j, i]), (-1.0, [j, i, j])], 0.5f64.sqrt());
                push(states, format!("s{i}{j}{j}"), sub, Irrep::Trivial, s);
                let kb = push(states, format!("b{i}{j}{j}"), sub, Irrep::Standard, b);
                let kc = push(states, format!("c{i}{j}{j}"), sub, Irrep::Standard, c);
                pairs.push(StandardPair { first: (kb, 1.0), second: (kc, 1.0) });
            };
            push(&mut states, "e2".into(), 0, Irrep::Trivial, ket3(&[(1.0, [2, 2, 2])], 1.0));
            ijj(&mut states, &mut pairs, 1, 2, 1);
            ijj(&mut states, &mut pairs, 3, 2, 1);
            ijj(&mut states, &mut pairs, 2, 1, 2);
            let (p123, p231, p312, p132, p213, p321) = ([1, 2, 3], [2, 3, 1], [3, 1, 2], [1, 3, 2], [2, 1, 3], [3, 2, 1]);
            let r6 = 1.0 / 6f64.sqrt();
            let r12 = 1.0 / 12f64.sqrt();
            let all = |sgn: [f64; 6], norm| {
                ket3(
                    &[(sgn[0], p123), (sgn[1], p231), (sgn[2], p312), (sgn[3], p132), (sgn[4], p213), (sgn[5], p321)],
                    norm,
                )
            };
            push(&mut states, "s123".into(), 2, Irrep::Trivial, all([1.0, 1.0, 1.0, 1.0, 1.0, 1.0], r6));
            push(&mut states, "a123".into(), 2, Irrep::Sign, all([1.0, 1.0, 1.0, -1.0, -1.0, -1.0], r6));
            let kb = push(&mut states, "b123".into(), 2, Irrep::Standard, all([2.0, -1.0, -1.0, 2.0, -1.0, -1.0], r12));
            let kc = push(&mut states, "c123".into(), 2, Irrep::Standard, all([0.0, 1.0, -1.0, 0.0, -1.0, 1.0], 0.5));
            let kd = push(&mut states, "d123".into(), 2, Irrep::Standard, all([2.0, -1.0, -1.0, -2.0, 1.0, 1.0], r12));
            let ke = push(&mut states, "e123".into(), 2, Irrep::Standard, all([0.0, 1.0, -1.0, 0.0, 1.0, -1.0], 0.5));
            pairs.push(StandardPair { first: (kb, 1.0), second: (kc, 1.0) });
            // (e, −d) transforms like (b, c).
            pairs.push(StandardPair { first: (ke, 1.0), second: (kd, -1.0) });
            ijj(&mut states, &mut pairs, 2, 3, 2);
            push(&mut states, "g".into(), 3, Irrep::Trivial, ket3(&[(1.0, [1, 1, 1])], 1.0));
            ijj(&mut states, &mut pairs, 3, 1, 3);
            ijj(&mut states, &mut pairs, 1, 3, 3);
            push(&mut states, "e3".into(), 3, Irrep::Trivial, ket3(&[(1.0, [3, 3, 3])], 1.0));
        }
        _ => panic!("n_atoms must be 1, 2 or 3"),
    }
    let d = hilbert_dim(n);
    let mut unitary = Array2::zeros((d, d));
    for (k, s) in states.iter().enumerate() {
        for r in 0..d {
            unitary[[r, k]] = C64::new(s.vector[r], 0.0);
        }
    }
    DickeBasis { n_atoms: n, states, pairs, unitary }
}

/// Index sets of the intensity subspaces in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePartition {
    pub sets: Vec<Vec<usize>>,
}

pub fn subspace_partition(basis: &DickeBasis) -> SubspacePartition {
    let mut sets = vec![Vec::new(); basis.n_atoms + 1];
    for (k, s) in basis.states.iter().enumerate() {
        sets[s.subspace].push(k);
    }
    SubspacePartition { sets }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorKind {
    Symmetric,
    Antisymmetric,
    TwoDimensional,
}

impl SectorKind {
    pub const ALL: [SectorKind; 3] = [SectorKind::Symmetric, SectorKind::Antisymmetric, SectorKind::TwoDimensional];

    pub fn name(self) -> &'static str {
        match self {
            SectorKind::Symmetric => "symmetric",
            SectorKind::Antisymmetric => "antisymmetric",
            SectorKind::TwoDimensional => "two-dimensional",
        }
    }
}

/// Orthonormal basis of one irrep sector of block R_ij.
#[derive(Debug, Clone)]
pub struct Sector {
    pub block: (usize, usize),
    pub kind: SectorKind,
    pub labels: Vec<String>,
    /// Vectorized basis elements as columns, 9^n × dim.
    pub basis: Array2<C64>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct IrrepDMBasis {
    pub n_atoms: usize,
    pub sectors: Vec<Sector>,
}

impl IrrepDMBasis {
    pub fn sector(&self, i: usize, j: usize, kind: SectorKind) -> &Sector {
        self.sectors
            .iter()
            .find(|s| s.block == (i, j) && s.kind == kind)
            .expect("sector outside the partition")
    }

    pub fn symmetric(&self, i: usize, j: usize) -> &Sector {
        self.sector(i, j, SectorKind::Symmetric)
    }

    pub fn total_dim(&self) -> usize {
        self.sectors.iter().map(Sector::dim).sum()
    }

    /// Aligned text table of the sector dimensions.
    pub fn dimension_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:<8} {:<16} {:>5}", "block", "sector", "dim").unwrap();
        for s in &self.sectors {
            let block = format!("R{}{}", s.block.0, s.block.1);
            writeln!(out, "{:<8} {:<16} {:>5}", block, s.kind.name(), s.dim()).unwrap();
        }
        writeln!(out, "{:<8} {:<16} {:>5}", "total", "", self.total_dim()).unwrap();
        out
    }
}

/// A signed linear combination of |u><v| elements, as Dicke indices.
type Combination = Vec<(f64, usize, usize)>;

fn vec_combination(basis: &DickeBasis, terms: &Combination) -> Array1<C64> {
    let d = hilbert_dim(basis.n_atoms);
    let mut out = Array1::zeros(d * d);
    for &(w, u, v) in terms {
        let (u, v) = (&basis.states[u].vector, &basis.states[v].vector);
        for c in 0..d {
            if v[c] == 0.0 {
                continue;
            }
            for r in 0..d {
                if u[r] != 0.0 {
                    out[c * d + r] += C64::new(w * u[r] * v[c], 0.0);
                }
            }
        }
    }
    out
}

fn label_of(basis: &DickeBasis, terms: &Combination) -> String {
    let parts: Vec<String> = terms
        .iter()
        .map(|&(w, u, v)| {
            let sign = if w < 0.0 { "-" } else { "+" };
            format!("{sign}|{}><{}|", basis.states[u].label, basis.states[v].label)
        })
        .collect();
    parts.join(" ")
}

fn sector_combinations(basis: &DickeBasis, i: usize, j: usize, kind: SectorKind) -> Vec<Combination> {
    let h = 0.5f64.sqrt();
    let triv = |s| basis.of_irrep(s, Irrep::Trivial);
    let sign = |s| basis.of_irrep(s, Irrep::Sign);
    let singles = |us: Vec<usize>, vs: Vec<usize>| -> Vec<Combination> {
        us.iter().flat_map(|&u| vs.iter().map(move |&v| vec![(1.0, u, v)])).collect()
    };
    let (pi, pj) = (basis.pairs_in(i), basis.pairs_in(j));
    let mut out = Vec::new();
    match kind {
        SectorKind::Symmetric => {
            out.extend(singles(triv(i), triv(j)));
            out.extend(singles(sign(i), sign(j)));
            for p in &pi {
                for q in &pj {
                    out.push(vec![
                        (h * p.first.1 * q.first.1, p.first.0, q.first.0),
                        (h * p.second.1 * q.second.1, p.second.0, q.second.0),
                    ]);
                }
            }
        }
        SectorKind::Antisymmetric => {
            out.extend(singles(triv(i), sign(j)));
            out.extend(singles(sign(i), triv(j)));
            for p in &pi {
                for q in &pj {
                    out.push(vec![
                        (h * p.first.1 * q.second.1, p.first.0, q.second.0),
                        (-h * p.second.1 * q.first.1, p.second.0, q.first.0),
                    ]);
                }
            }
        }
        SectorKind::TwoDimensional => {
            for u in triv(i).into_iter().chain(sign(i)) {
                for q in &pj {
                    out.push(vec![(q.first.1, u, q.first.0)]);
                    out.push(vec![(q.second.1, u, q.second.0)]);
                }
            }
            for p in &pi {
                for v in triv(j).into_iter().chain(sign(j)) {
                    out.push(vec![(p.first.1, p.first.0, v)]);
                    out.push(vec![(p.second.1, p.second.0, v)]);
                }
            }
            for p in &pi {
                for q in &pj {
                    out.push(vec![
                        (h * p.first.1 * q.first.1, p.first.0, q.first.0),
                        (-h * p.second.1 * q.second.1, p.second.0, q.second.0),
                    ]);
                    out.push(vec![
                        (h * p.first.1 * q.second.1, p.first.0, q.second.0),
                        (h * p.second.1 * q.first.1, p.second.0, q.first.0),
                    ]);
                }
            }
        }
    }
    out
}

pub fn build_irrep_dm_basis(basis: &DickeBasis) -> IrrepDMBasis {
    let n = basis.n_atoms;
    let d2 = hilbert_dim(n).pow(2);
    let mut sectors = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for kind in SectorKind::ALL {
                let combos = sector_combinations(basis, i, j, kind);
                let mut m = Array2::zeros((d2, combos.len()));
                let mut labels = Vec::with_capacity(combos.len());
                for (k, c) in combos.iter().enumerate() {
                    m.column_mut(k).assign(&vec_combination(basis, c));
                    labels.push(label_of(basis, c));
                }
                sectors.push(Sector { block: (i, j), kind, labels, basis: m });
            }
        }
    }
    IrrepDMBasis { n_atoms: n, sectors }
}

/// B† · sup · B for the sector basis B.
pub fn reduce_operator(sup: &Superoperator, sector: &Sector) -> Array2<C64> {
    let b = &sector.basis;
    // Superoperators are sparse; skip the zeros of L in L·B.
    let mut lb = Array2::<C64>::zeros(b.raw_dim());
    for (r, row) in sup.matrix.outer_iter().enumerate() {
        let mut out = lb.row_mut(r);
        for (c, z) in row.iter().enumerate() {
            if z.re != 0.0 || z.im != 0.0 {
                out.scaled_add(*z, &b.row(c));
            }
        }
    }
    b.t().mapv(|z| z.conj()).dot(&lb)
}

/// Expand a sector coordinate vector to a density matrix.
pub fn expand(sector: &Sector, coords: &Array1<C64>, hilbert: usize) -> Array2<C64> {
    crate::linalg::unvectorize(&sector.basis.dot(coords), hilbert)
}

/// All permutations of `n` atoms.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 0, 2],
        ],
        _ => panic!("n_atoms must be 1, 2 or 3"),
    }
}

/// Unitary moving the state of atom k to position perm[k].
pub fn permutation_matrix(perm: &[usize]) -> Array2<C64> {
    let n = perm.len();
    let d = hilbert_dim(n);
    let mut p = Array2::zeros((d, d));
    for idx in 0..d {
        let l = levels_of(idx, n);
        let mut moved = vec![0; n];
        for k in 0..n {
            moved[perm[k]] = l[k];
        }
        p[[index_of(&moved), idx]] = ONE;
    }
    p
}

/// Group average (1/|G|) Σ P ρ Pᵀ.
pub fn symmetrize(rho: &Array2<C64>, n: usize) -> Array2<C64> {
    let perms = permutations(n);
    let mut acc: Array2<C64> = Array2::zeros(rho.raw_dim());
    for perm in &perms {
        let p = permutation_matrix(perm);
        acc = acc + p.dot(rho).dot(&p.t());
    }
    acc.mapv(|z| z / perms.len() as f64)
}
