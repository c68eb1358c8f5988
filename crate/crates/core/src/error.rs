use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis dimension {dim} exceeds the configured cap {cap}")]
    BasisTooLarge { dim: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("parameters are not in the symmetric case (u_a = u_b, tau_a = tau_b)")]
    Asymmetric,

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("outside the domain |x| < 1, |y| < 1: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
