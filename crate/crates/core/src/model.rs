//! Physical parameters, geometry and the dipole-dipole coupling constant.
//!
//! All rates are angular frequencies in s⁻¹ with ħ = 1. Distances are
//! measured in units of λ3, the wavelength of the strong transition.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two three-level configurations is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelScheme {
    /// Strong |1>↔|3> and weak |1>↔|2> laser drives, no spontaneous |2>,|3> decay paths other than A3.
    V,
    /// Strong |1>↔|3> drive with weak spontaneous decays |3>→|2> (A2) and |2>→|1> (A1).
    D,
}

/// Default lower bound on the separation of scales ratio.
pub const DEFAULT_SEPARATION: f64 = 100.0;

/// Below this separation ratio validation fails instead of warning.
pub const HARD_SEPARATION: f64 = 10.0;

/// Parameters of the atom array. Transition j is indexed 1..=3 in the
/// accessors and stored at j-1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub scheme: LevelScheme,
    pub n_atoms: usize,
    /// Einstein coefficients A1, A2, A3.
    pub a: [f64; 3],
    pub omega2: f64,
    pub omega3: f64,
    /// Coupling constants C1, C2, C3.
    pub c: [Complex64; 3],
}

impl SystemParams {
    /// Three V systems without dipole coupling.
    pub fn v(a3: f64, omega3: f64, omega2: f64) -> Self {
        SystemParams {
            scheme: LevelScheme::V,
            n_atoms: 3,
            a: [0.0, 0.0, a3],
            omega2,
            omega3,
            c: [Complex64::new(0.0, 0.0); 3],
        }
    }

    /// Three D systems without dipole coupling.
    pub fn d(a1: f64, a2: f64, a3: f64, omega3: f64) -> Self {
        SystemParams {
            scheme: LevelScheme::D,
            n_atoms: 3,
            a: [a1, a2, a3],
            omega2: 0.0,
            omega3,
            c: [Complex64::new(0.0, 0.0); 3],
        }
    }

    pub fn with_n_atoms(mut self, n: usize) -> Self {
        self.n_atoms = n;
        self
    }

    pub fn with_c3(mut self, c3: Complex64) -> Self {
        self.c[2] = c3;
        self
    }

    /// Einstein coefficient of transition `j` (1-based).
    pub fn a_j(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    /// Coupling constant of transition `j` (1-based).
    pub fn c_j(&self, j: usize) -> Complex64 {
        self.c[j - 1]
    }

    /// Same parameters with every coupling constant set to zero.
    pub fn independent(&self) -> Self {
        SystemParams {
            c: [Complex64::new(0.0, 0.0); 3],
            ..*self
        }
    }

    /// The unperturbed parameters: the small ones zeroed.
    pub fn unperturbed(&self) -> Self {
        let mut p = *self;
        match self.scheme {
            LevelScheme::V => p.omega2 = 0.0,
            LevelScheme::D => {
                p.a[0] = 0.0;
                p.a[1] = 0.0;
                p.c[0] = Complex64::new(0.0, 0.0);
                p.c[1] = Complex64::new(0.0, 0.0);
            }
        }
        p
    }

    /// True when transition `j` has either a decay rate or a coupling.
    pub fn is_active(&self, j: usize) -> bool {
        self.a_j(j) != 0.0 || self.c_j(j) != Complex64::new(0.0, 0.0)
    }

    /// Collective decay rates of transition `j`: the symmetric channel
    /// first, then the others.
    pub fn collective_rates(&self, j: usize) -> Vec<f64> {
        let a = self.a_j(j);
        let re = self.c_j(j).re;
        match self.n_atoms {
            1 => vec![a],
            2 => vec![a + re, a - re],
            _ => vec![a + 2.0 * re, a - re, a - re],
        }
    }

    /// Ratio of the large to the small rates; infinite when the small
    /// rates vanish.
    pub fn separation_ratio(&self) -> f64 {
        let large = self.omega3.min(self.a[2]);
        let small = match self.scheme {
            LevelScheme::V => self.omega2,
            LevelScheme::D => self.a[0].max(self.a[1]),
        };
        if small == 0.0 {
            f64::INFINITY
        } else {
            large / small
        }
    }

    /// Validate with the default separation threshold.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(DEFAULT_SEPARATION)
    }

    /// Check scheme invariants, signs and collective rates. A separation
    /// ratio between [`HARD_SEPARATION`] and `threshold` only logs a warning.
    pub fn validate_with(&self, threshold: f64) -> Result<()> {
        if !(1..=3).contains(&self.n_atoms) {
            return Err(Error::Parameter(format!("n_atoms must be 1, 2 or 3, got {}", self.n_atoms)));
        }
        let finite = self.a.iter().chain([&self.omega2, &self.omega3]).all(|x| x.is_finite())
            && self.c.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::Parameter("non-finite parameter".into()));
        }
        for (j, &a) in self.a.iter().enumerate() {
            if a < 0.0 {
                return Err(Error::Parameter(format!("A{} = {a} is negative", j + 1)));
            }
        }
        if self.omega2 < 0.0 || self.omega3 < 0.0 {
            return Err(Error::Parameter("Rabi frequencies must be nonnegative".into()));
        }
        let zero = Complex64::new(0.0, 0.0);
        match self.scheme {
            LevelScheme::V => {
                if self.a[0] != 0.0 || self.a[1] != 0.0 || self.c[0] != zero || self.c[1] != zero {
                    return Err(Error::Parameter("V scheme requires A1 = A2 = C1 = C2 = 0".into()));
                }
            }
            LevelScheme::D => {
                if self.omega2 != 0.0 {
                    return Err(Error::Parameter("D scheme requires Omega2 = 0".into()));
                }
            }
        }
        for j in 1..=3 {
            if !self.is_active(j) {
                continue;
            }
            let tol = 1e-12 * self.a_j(j).max(self.c_j(j).norm());
            for rate in self.collective_rates(j) {
                if rate < -tol {
                    return Err(Error::Unphysical(format!(
                        "collective decay rate {rate:.6e} of transition {j} is negative (A{j} = {}, C{j} = {})",
                        self.a_j(j),
                        self.c_j(j)
                    )));
                }
            }
        }
        let ratio = self.separation_ratio();
        if ratio < HARD_SEPARATION {
            return Err(Error::Parameter(format!(
                "separation of scales violated: ratio {ratio:.3} < {HARD_SEPARATION}"
            )));
        }
        if ratio < threshold {
            log::warn!("separation of scales ratio {ratio:.3} is below {threshold}; perturbative rates may be inaccurate");
        }
        Ok(())
    }
}

/// Pair angles of the equilateral arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairAngles {
    /// One angle for all three pairs.
    Equal(f64),
    /// Angles for the pairs (1,2), (1,3), (2,3).
    PerPair([f64; 3]),
}

/// Equilateral triangle of atoms with side `r` (units of λ3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub r: f64,
    /// Wavelengths λ_j / λ3. `None` leaves C_j at zero.
    pub wavelengths: [Option<f64>; 3],
    pub angles: PairAngles,
}

impl Geometry {
    /// Equal coupling at angle π/2, only transition 3 coupled.
    pub fn equilateral(r: f64) -> Self {
        Geometry {
            r,
            wavelengths: [None, None, Some(1.0)],
            angles: PairAngles::Equal(PI / 2.0),
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.angles = PairAngles::Equal(theta);
        self
    }

    /// Dimensionless distance a = 2πr/λ_j, if transition j has a wavelength.
    pub fn a_j(&self, j: usize) -> Option<f64> {
        self.wavelengths[j - 1].map(|l| 2.0 * PI * self.r / l)
    }
}

/// Dipole-dipole coupling constant C(A, a, θ).
pub fn coupling_constant(a_rate: f64, a: f64, theta: f64) -> Result<Complex64> {
    if a_rate < 0.0 {
        return Err(Error::Parameter(format!("negative decay rate {a_rate}")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("dimensionless distance must be positive, got {a}")));
    }
    if a.is_infinite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let i = Complex64::i();
    let cos2 = theta.cos().powi(2);
    let far = (1.0 - cos2) / (i * a);
    let near = (1.0 / (a * a) - 1.0 / (i * a.powi(3))) * (1.0 - 3.0 * cos2);
    Ok(1.5 * a_rate * (i * a).exp() * (far + near))
}

/// Fill the coupling constants of `base` from an equal-coupling geometry.
pub fn params_from_geometry(base: &SystemParams, geom: &Geometry) -> Result<SystemParams> {
    let theta = match geom.angles {
        PairAngles::Equal(t) => t,
        PairAngles::PerPair(_) => {
            return Err(Error::Parameter(
                "unequal pair couplings are not supported by the symmetric solver".into(),
            ))
        }
    };
    if !(geom.r > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {}", geom.r)));
    }
    let mut p = *base;
    for j in 1..=3 {
        p.c[j - 1] = Complex64::new(0.0, 0.0);
        if base.a_j(j) == 0.0 {
            continue;
        }
        if let Some(l) = geom.wavelengths[j - 1] {
            if !(l > 0.0) {
                return Err(Error::Parameter(format!("wavelength of transition {j} must be positive")));
            }
            p.c[j - 1] = coupling_constant(base.a_j(j), geom.a_j(j).unwrap(), theta)?;
        }
    }
    p.validate()?;
    Ok(p)
}

/// Named parameter presets for the V and D sweeps, plus desk-scale sets for
/// trajectory simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub params: SystemParams,
    /// Resolution time T_m in seconds.
    pub t_m: f64,
    /// Default sweep range in units of λ3.
    pub r_range: (f64, f64),
    /// Distance used for single-point runs.
    pub r: f64,
}

pub fn fig4_params() -> SystemParams {
    SystemParams::v(2e8, 5e7, 1e4)
}

pub fn fig5_params() -> SystemParams {
    SystemParams::d(1.0, 1.0, 2e8, 1e7)
}

pub const PRESET_NAMES: [&str; 8] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "desk-v", "desk-d"];

pub fn preset(name: &str) -> Option<Preset> {
    let p = |name, params, t_m, r_range, r| Preset { name, params, t_m, r_range, r };
    Some(match name.to_ascii_lowercase().as_str() {
        "fig4" => p("fig4", fig4_params(), 1e-3, (0.5, 2.0), 1.0),
        "fig5" => p("fig5", fig5_params(), 5e-3, (0.5, 2.0), 0.7),
        "fig6" => p("fig6", fig4_params(), 1e-3, (0.5, 20.0), 1.2),
        "fig7" => p("fig7", fig5_params(), 5e-3, (0.5, 20.0), 0.7),
        "fig8" => p("fig8", fig4_params(), 1e-3, (0.5, 20.0), 1.2),
        "fig9" => p("fig9", fig5_params(), 5e-3, (0.5, 20.0), 0.7),
        "desk-v" => p("desk-v", SystemParams::v(2e3, 5e2, 20.0), 5e-3, (0.5, 2.0), 1.2),
        "desk-d" => p("desk-d", SystemParams::d(2.0, 12.0, 2e3, 1e3), 1e-2, (0.5, 2.0), 0.7),
        _ => return None,
    })
}

/// Structured-text form of the parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamConfig {
    pub scheme: Option<LevelScheme>,
    pub n_atoms: Option<usize>,
    #[serde(rename = "A1")]
    pub a1: Option<f64>,
    #[serde(rename = "A2")]
    pub a2: Option<f64>,
    #[serde(rename = "A3")]
    pub a3: Option<f64>,
    #[serde(rename = "Omega2")]
    pub omega2: Option<f64>,
    #[serde(rename = "Omega3")]
    pub omega3: Option<f64>,
    pub r_over_lambda3: Option<f64>,
    pub theta: Option<f64>,
    /// Explicit C3 as `[re, im]`, overriding the geometry.
    #[serde(rename = "C3")]
    pub c3: Option<[f64; 2]>,
}

impl ParamConfig {
    /// Overlay the config on `base`; returns the parameters and the
    /// geometry if a distance was given.
    pub fn apply(&self, base: SystemParams) -> (SystemParams, Option<Geometry>) {
        let mut p = base;
        if let Some(s) = self.scheme {
            if s != p.scheme {
                p = match s {
                    LevelScheme::V => SystemParams::v(p.a[2], p.omega3, 0.0),
                    LevelScheme::D => SystemParams::d(0.0, 0.0, p.a[2], p.omega3),
                }
                .with_n_atoms(p.n_atoms);
            }
        }
        if let Some(n) = self.n_atoms {
            p.n_atoms = n;
        }
        for (slot, v) in p.a.iter_mut().zip([self.a1, self.a2, self.a3]) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(v) = self.omega2 {
            p.omega2 = v;
        }
        if let Some(v) = self.omega3 {
            p.omega3 = v;
        }
        if let Some([re, im]) = self.c3 {
            p.c[2] = Complex64::new(re, im);
        }
        let geom = self.r_over_lambda3.map(|r| {
            let g = Geometry::equilateral(r);
            match self.theta {
                Some(t) => g.with_theta(t),
                None => g,
            }
        });
        (p, geom)
    }
}
