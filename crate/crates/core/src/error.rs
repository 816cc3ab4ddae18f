use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval set: {0}")]
    InvalidSet(String),

    #[error("cantor spec has {available} removal fractions, generation {requested} requested")]
    InsufficientDepth { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("point {0} lies on the support")]
    OnSupport(f64),

    #[error("coincident evaluation points: {0}")]
    Singularity(String),

    #[error("mass point on support at x = {0}")]
    MassOnSupport(f64),

    #[error("point mass at x = {x} has nonpositive weight {weight}")]
    NonPositiveMass { x: f64, weight: f64 },

    #[error("duplicate point at x = {0}")]
    DuplicatePoint(f64),

    #[error("poles and zeros do not interlace: {0}")]
    NonInterlacing(String),

    #[error("failed to bracket a zero in ({lo}, {hi})")]
    Bracketing { lo: f64, hi: f64 },

    #[error("Lanczos breakdown at index {index}: rank exhausted")]
    RankExhausted { index: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("sequence too short: need {needed}, have {available}")]
    InsufficientLength { needed: usize, available: usize },
}

impl Error {
    /// True for failures of the numerics (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGeometry(_) | Error::Bracketing { .. } | Error::RankExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
