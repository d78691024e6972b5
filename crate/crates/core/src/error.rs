use thiserror::Error;

/// Failure modes shared by every module of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is singular or not skew-symmetric (condition estimate {condition:.3e})")]
    NonSkew { condition: f64 },

    #[error("matrix lies outside the range of the inverse Cayley transform (Q + E singular, condition estimate {condition:.3e})")]
    OutOfRange { condition: f64 },

    #[error("trajectory integration exceeded {max_steps} steps at s = {reached}")]
    Divergence { max_steps: usize, reached: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
