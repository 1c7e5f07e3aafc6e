use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used to pick process exit codes and FFI status codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input or configuration.
    Config,
    /// A numerical procedure failed to converge or lost accuracy.
    Numerical,
    /// The input lies outside the regime the theory covers (non-hyperbolic, excluded locus).
    Domain,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("orbit escaped at step {step} (|z| = {modulus:e})")]
    Escaped { step: usize, modulus: f64 },

    #[error(
        "root finder did not converge after {sweeps} sweeps on a degree-{degree} polynomial \
         (worst residual {worst_residual:e}); coefficients: {polynomial:?}"
    )]
    RootsNotConverged {
        degree: usize,
        sweeps: usize,
        worst_residual: f64,
        polynomial: Vec<Complex64>,
    },

    #[error("periodic points of period {period} could not be grouped into orbits: {reason}")]
    Clustering { period: usize, reason: String },

    #[error("non-hyperbolic cycle: multiplier {multiplier} has modulus within 1e-8 of 1")]
    NonHyperbolic { multiplier: Complex64 },

    #[error("singular cycle system: multiplier {multiplier} is too close to 1")]
    SingularCycleSystem { multiplier: Complex64 },

    #[error("continuation left hyperbolic regime: {0}")]
    ContinuationFailed(String),

    #[error("cover crosses critical value; increase depth or reject map (depth {depth})")]
    CoverCrossesCriticalValue { depth: usize },

    #[error("power iteration did not converge after {iterations} iterations (bracket gap {gap:e}, {cells} cells)")]
    PowerIteration {
        iterations: usize,
        gap: f64,
        cells: usize,
    },

    #[error("map not in expected regime: {0}")]
    Regime(String),

    #[error("dimension did not stabilise: last estimate {delta}, last two depths differ by {change:e} (tolerance {tol:e})")]
    DimensionNotConverged { delta: f64, change: f64, tol: f64 },

    #[error("excluded: {0}")]
    Excluded(&'static str),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("no repelling cycles of period {0}")]
    NoCycles(usize),

    #[error("step too small: second difference is below the noise floor; use a larger scale (got {scale:e})")]
    NoiseFloor { scale: f64 },

    #[error("metric routes disagree by {disagreement:.3} (limit {limit}); discretisation problem")]
    RouteDisagreement { disagreement: f64, limit: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Io(_) => ErrorClass::Config,
            Error::NonHyperbolic { .. }
            | Error::Regime(_)
            | Error::Excluded(_)
            | Error::OutOfRange(_)
            | Error::ContinuationFailed(_) => ErrorClass::Domain,
            _ => ErrorClass::Numerical,
        }
    }

    /// Process exit code: 2 config, 3 numerical failure, 4 domain guard.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Domain => 4,
        }
    }
}
