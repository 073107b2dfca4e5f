use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// The variants map onto the CLI exit codes: configuration problems exit
/// with 2, unphysical parameters with 3 and numerical failures with 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical configuration: {0}")]
    Unphysical(String),

    #[error("degenerate null space: expected dimension {expected}, found {found} (singular values near zero: {singular_values:?})")]
    Degeneracy {
        expected: usize,
        found: usize,
        singular_values: Vec<f64>,
    },

    #[error("ill-conditioned Gram matrix (condition number {0:.3e})")]
    Conditioning(f64),

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("model assumption violated: {0}")]
    ModelAssumption(String),

    #[error("degenerate Markov chain: {0}")]
    DegenerateChain(String),

    #[error("integrator error: {0}")]
    Integrator(String),

    #[error("segmentation parameter error: {0}")]
    Segmentation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("linear algebra backend: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Segmentation(_) | Error::Io(_) | Error::Csv(_) => 2,
            Error::Parameter(_) | Error::Domain(_) | Error::Unphysical(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
