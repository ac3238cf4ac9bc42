use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested integral does not converge (decay certificate rejected).
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// Quadrature could not reach the target accuracy; the partial value and
    /// its error bound are carried so callers can decide whether to use them.
    #[error("accuracy target missed: value {value}, error bound {error_bound}")]
    Accuracy { value: f64, error_bound: f64 },

    /// An estimator is undefined on this input (e.g. a score with no usable terms).
    #[error("estimator undefined: {0}")]
    Degenerate(String),

    /// Not enough observations to run the requested procedure.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
