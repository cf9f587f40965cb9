use thiserror::Error;

/// Errors produced by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FadeError {
    #[error("fractional order alpha = {0} outside (1, 2]")]
    OrderOutOfRange(f64),

    #[error("skewness |theta| = {theta} exceeds min(alpha, 2 - alpha) = {bound}")]
    SkewOutOfRange { theta: f64, bound: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("least-squares system is rank deficient at lambda = 0; use a positive lambda")]
    RankDeficient,

    #[error("invalid regularization setup: {0}")]
    InvalidRegularization(String),

    #[error("reference vector has zero norm")]
    ZeroReference,

    #[error("t = {t} too small for spectral quadrature: needs k_max = {needed:.3e} > cap {cap:.3e}")]
    TimeTooSmall { t: f64, needed: f64, cap: f64 },

    #[error("invalid spectral configuration: {0}")]
    InvalidSpectralConfig(String),

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),
}

impl FadeError {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            FadeError::Singular(_)
                | FadeError::RankDeficient
                | FadeError::Decomposition(_)
                | FadeError::TimeTooSmall { .. }
        )
    }
}

pub type Result<T, E = FadeError> = std::result::Result<T, E>;
