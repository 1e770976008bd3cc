use thiserror::Error;

/// Errors raised by state construction, channels and phase-space routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff too small: dimension {dim} given, {required} required ({reason})")]
    CutoffTooSmall {
        dim: usize,
        required: usize,
        reason: String,
    },

    #[error("invalid state specification: {0}")]
    InvalidSpec(String),

    #[error("invalid transmittance {0}: must lie in [0, 1]")]
    InvalidTransmittance(f64),

    #[error("invalid squeezing parameter {0}: must be finite and non-negative")]
    InvalidSqueezing(f64),

    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimMismatch(usize, usize),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("quadrature did not converge: last refinement changed the result by {0:e}")]
    QuadratureNotConverged(f64),

    #[error("invalid smoothing parameter tau = {0}")]
    InvalidTau(f64),

    #[error("Gaussian R-function not representable: tau + cov_minus = {0} <= 0")]
    NotRepresentable(f64),

    #[error("phase-space grid too small: {0}")]
    GridTooSmall(String),

    #[error("unsupported state for numeric depth estimation: {0}")]
    UnsupportedSpec(String),

    #[error("ordering parameter s = {0} outside the convergent range s < 1/2")]
    OrderOutOfRange(f64),

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
