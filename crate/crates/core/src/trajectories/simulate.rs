use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dagger, C64, ONE};
use crate::model::SystemParams;
use crate::operators::{conditional_hamiltonian, hilbert_dim, jump_channels, single_atom_channels, JumpChannel};
use crate::symmetry::product_subspaces;

/// Eigenvector condition number above which the propagator falls back to
/// a matrix exponential per evaluation.
pub const CONDITION_GUARD: f64 = 1e8;

/// Relative tolerance of the jump time.
pub const TIME_TOLERANCE: f64 = 1e-6;

/// Default subspace weight needed to switch the hidden level.
pub const DEFAULT_LABEL_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emission {
    pub time: f64,
    pub channel: usize,
}

/// Change of the dominant subspace of the conditional state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelChange {
    pub time: f64,
    pub level: usize,
}

/// Photon emissions of one trajectory together with the hidden intensity
/// level (the subspace holding most of the conditional state's weight).
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionRecord {
    pub seed: u64,
    pub duration: f64,
    pub events: Vec<Emission>,
    /// Starts with the level at t = 0.
    pub levels: Vec<LevelChange>,
    /// Transition (1..=3) emitted by each channel index.
    pub channel_transitions: Vec<usize>,
}

impl EmissionRecord {
    /// Emissions on transition `j`.
    pub fn count_transition(&self, j: usize) -> usize {
        self.events.iter().filter(|e| self.channel_transitions[e.channel] == j).count()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["time", "channel"])?;
        for e in &self.events {
            wr.write_record([format!("{:.16e}", e.time), e.channel.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

enum Propagator {
    Eigen {
        vectors: Array2<C64>,
        inverse: Array2<C64>,
        /// −i λ_k.
        rates: Array1<C64>,
    },
    Exponential {
        h: Array2<C64>,
    },
}

/// exp(a) by scaling and squaring with a Taylor series.
fn expm(a: &Array2<C64>) -> Array2<C64> {
    let norm1 = (0..a.ncols())
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings));
    let n = a.nrows();
    let mut term: Array2<C64> = Array2::eye(n);
    let mut sum = term.clone();
    for k in 1..=18 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum = sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// No-jump evolution from a fixed initial state.
struct Branch<'a> {
    prop: &'a Propagator,
    psi0: Array1<C64>,
    coeffs: Option<Array1<C64>>,
}

impl Branch<'_> {
    fn state(&self, t: f64) -> Array1<C64> {
        match (self.prop, &self.coeffs) {
            (Propagator::Eigen { vectors, rates, .. }, Some(c)) => {
                let e: Array1<C64> = c.iter().zip(rates).map(|(c, r)| c * (r * t).exp()).collect();
                vectors.dot(&e)
            }
            (Propagator::Exponential { h }, _) => expm(&h.mapv(|z| z * C64::new(0.0, -t))).dot(&self.psi0),
            _ => unreachable!(),
        }
    }
}

fn norm_sqr(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Quantum trajectory simulator for one parameter set.
pub struct Simulator {
    pub n_atoms: usize,
    pub channels: Vec<JumpChannel>,
    prop: Propagator,
    subspaces: Vec<Vec<usize>>,
    first_step: f64,
    pub max_events: usize,
    /// Weight a subspace must reach before the hidden level switches to it.
    pub label_threshold: f64,
}

impl Simulator {
    /// Collective channels, or single-atom channels when every coupling
    /// vanishes so that emissions can be attributed to atoms.
    pub fn new(p: &SystemParams) -> Result<Self> {
        p.validate_with(crate::model::HARD_SEPARATION)?;
        let channels = if p.c.iter().all(|c| c.norm() == 0.0) {
            single_atom_channels(p)?
        } else {
            jump_channels(p)?
        };
        Self::with_channels(p, channels)
    }

    pub fn with_channels(p: &SystemParams, channels: Vec<JumpChannel>) -> Result<Self> {
        let h = conditional_hamiltonian(p)?;
        let prop = match h.eig() {
            Ok((vals, vecs)) => {
                let (_, sv, _) = vecs.svd(false, false)?;
                let cond = sv[0] / sv[sv.len() - 1];
                if cond.is_finite() && cond <= CONDITION_GUARD {
                    let inverse = vecs.inv()?;
                    let rates = vals.mapv(|l| C64::new(0.0, -1.0) * l);
                    Propagator::Eigen { vectors: vecs, inverse, rates }
                } else {
                    log::info!("eigenvector condition {cond:.3e}; using matrix exponentials");
                    Propagator::Exponential { h: h.clone() }
                }
            }
            Err(_) => Propagator::Exponential { h: h.clone() },
        };
        let total: f64 = channels.iter().map(|c| c.rate).sum();
        let first_step = if total > 0.0 { 0.1 / total } else { 1.0 };
        Ok(Simulator {
            n_atoms: p.n_atoms,
            channels,
            prop,
            subspaces: product_subspaces(p.n_atoms),
            first_step,
            max_events: 100_000_000,
            label_threshold: DEFAULT_LABEL_THRESHOLD,
        })
    }

    pub fn uses_eigenbasis(&self) -> bool {
        matches!(self.prop, Propagator::Eigen { .. })
    }

    /// All atoms in level |1>.
    pub fn ground_state(&self) -> Array1<C64> {
        let mut psi = Array1::zeros(hilbert_dim(self.n_atoms));
        psi[0] = ONE;
        psi
    }

    fn branch(&self, psi: Array1<C64>) -> Branch<'_> {
        let coeffs = match &self.prop {
            Propagator::Eigen { inverse, .. } => Some(inverse.dot(&psi)),
            Propagator::Exponential { .. } => None,
        };
        Branch { prop: &self.prop, psi0: psi, coeffs }
    }

    fn weights(&self, psi: &Array1<C64>) -> Vec<f64> {
        let w: Vec<f64> = self.subspaces.iter().map(|s| s.iter().map(|&x| psi[x].norm_sqr()).sum()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    fn dominant(&self, psi: &Array1<C64>) -> usize {
        let w = self.weights(psi);
        (0..w.len()).fold(0, |b, k| if w[k] > w[b] { k } else { b })
    }

    /// Hidden level after `psi`, starting from `current`.
    fn relabel(&self, psi: &Array1<C64>, current: usize) -> usize {
        let w = self.weights(psi);
        let best = (0..w.len()).fold(0, |b, k| if w[k] > w[b] { k } else { b });
        if best != current && w[best] >= self.label_threshold {
            best
        } else {
            current
        }
    }

    /// Norm of the unnormalized no-jump state on a grid, for diagnostics.
    pub fn norm_profile(&self, psi: &Array1<C64>, times: &[f64]) -> Vec<f64> {
        let b = self.branch(psi.clone());
        times.iter().map(|&t| norm_sqr(&b.state(t))).collect()
    }

    pub fn simulate(&self, seed: u64, duration: f64) -> Result<EmissionRecord> {
        self.simulate_from(seed, duration, self.ground_state())
    }

    pub fn simulate_from(&self, seed: u64, duration: f64, initial: Array1<C64>) -> Result<EmissionRecord> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::Parameter(format!("duration must be finite and nonnegative, got {duration}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nrm = norm_sqr(&initial).sqrt();
        let mut psi = initial.mapv(|z| z / nrm);
        let mut t0 = 0.0;
        let mut level = self.dominant(&psi);
        let mut events = Vec::new();
        let mut levels = vec![LevelChange { time: 0.0, level }];
        let tol = 1e-12;
        while t0 < duration {
            let b = self.branch(psi.clone());
            let remaining = duration - t0;
            let u: f64 = loop {
                let u: f64 = rng.random();
                if u > 0.0 {
                    break u;
                }
            };
            let norm_at = |t: f64| -> Result<f64> {
                let n = norm_sqr(&b.state(t));
                if !n.is_finite() || n > 1.0 + 1e-9 {
                    return Err(Error::Integrator(format!("no-jump norm {n} at t = {t}")));
                }
                Ok(n)
            };
            // Bracket the jump time by doubling, then bisect.
            let (mut lo, mut hi) = (0.0, self.first_step.min(remaining));
            let mut jump = true;
            let mut n_lo = 1.0;
            loop {
                let n_hi = norm_at(hi)?;
                if n_hi > n_lo + tol {
                    return Err(Error::Integrator(format!("norm increased from {n_lo} to {n_hi}")));
                }
                if n_hi <= u {
                    break;
                }
                if hi >= remaining {
                    jump = false;
                    break;
                }
                lo = hi;
                n_lo = n_hi;
                hi = (hi * 2.0).min(remaining);
            }
            let tau = if jump {
                while hi - lo > TIME_TOLERANCE * hi {
                    let mid = 0.5 * (lo + hi);
                    if norm_at(mid)? > u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            } else {
                remaining
            };
            if jump && tau <= 0.0 {
                return Err(Error::Integrator("jump interval underflow".into()));
            }
            let phi = b.state(tau);
            let before = self.relabel(&phi, level);
            if before != level {
                // Locate where the dominant subspace changed.
                let (mut a, mut c) = (0.0, tau);
                while c - a > TIME_TOLERANCE * c {
                    let mid = 0.5 * (a + c);
                    if self.relabel(&b.state(mid), level) == level {
                        a = mid;
                    } else {
                        c = mid;
                    }
                }
                level = before;
                levels.push(LevelChange { time: t0 + c, level });
            }
            if !jump {
                break;
            }
            let t = t0 + tau;
            let weights: Vec<f64> = self.channels.iter().map(|ch| ch.rate * norm_sqr(&ch.op.dot(&phi))).collect();
            let total: f64 = weights.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Integrator(format!("no channel can emit at t = {t}")));
            }
            let mut pick = rng.random::<f64>() * total;
            let mut k = weights.len() - 1;
            for (idx, w) in weights.iter().enumerate() {
                if pick < *w {
                    k = idx;
                    break;
                }
                pick -= w;
            }
            let next = self.channels[k].op.dot(&phi);
            let nn = norm_sqr(&next).sqrt();
            psi = next.mapv(|z| z / nn);
            if events.last().is_some_and(|e: &Emission| e.time >= t) {
                return Err(Error::Integrator(format!("jump times not increasing at t = {t}")));
            }
            events.push(Emission { time: t, channel: k });
            if events.len() > self.max_events {
                return Err(Error::Integrator(format!("more than {} events", self.max_events)));
            }
            let after = self.relabel(&psi, level);
            if after != level {
                level = after;
                levels.push(LevelChange { time: t, level });
            }
            t0 = t;
        }
        Ok(EmissionRecord {
            seed,
            duration,
            events,
            levels,
            channel_transitions: self.channels.iter().map(|c| c.transition).collect(),
        })
    }

    /// Γ = Σ rate R†R, the anti-Hermitian part of the conditional Hamiltonian.
    pub fn decay_operator(&self) -> Array2<C64> {
        let d = hilbert_dim(self.n_atoms);
        let mut g = Array2::zeros((d, d));
        for ch in &self.channels {
            g = g + dagger(&ch.op).dot(&ch.op).mapv(|z| z * ch.rate);
        }
        g
    }
}

pub fn simulate(p: &SystemParams, seed: u64, duration: f64) -> Result<EmissionRecord> {
    Simulator::new(p)?.simulate(seed, duration)
}

/// Independent trajectories for each seed, in seed order.
pub fn simulate_many(p: &SystemParams, seeds: &[u64], duration: f64) -> Result<Vec<EmissionRecord>> {
    let sim = Simulator::new(p)?;
    seeds.par_iter().map(|&s| sim.simulate(s, duration)).collect()
}
