use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation dimension {dim} too small: Poisson tail mass {tail_mass:e} exceeds tolerance {tolerance:e}")]
    TruncationTooSmall { dim: usize, tail_mass: f64, tolerance: f64 },

    #[error("number state index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid resolution {0}: must be positive and finite")]
    InvalidResolution(f64),

    #[error("invalid amplitude {0}: must be finite")]
    InvalidAmplitude(num_complex::Complex64),

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("outcome n_m = {nm} has negligible density {density:e}")]
    NegligibleOutcome { nm: f64, density: f64 },

    #[error("outcome grid insufficient: integral of P over grid is {integral}")]
    GridInsufficient { integral: f64 },

    #[error("invalid outcome grid: {0}")]
    InvalidGrid(String),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("at resolution dn = {dn}: {source}")]
    AtResolution {
        dn: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}
