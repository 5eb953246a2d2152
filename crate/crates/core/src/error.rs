use thiserror::Error;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two point clouds (or projected sample sets) have different sizes.
    #[error("sample counts differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    /// Vector or point dimension does not match what the operation expects.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Invalid parameter for a constructor or operation.
    #[error("{0}")]
    InvalidParameter(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The circular defining function is not differentiable at x = r*theta.
    #[error("degenerate point: x coincides with r*theta (circular defining function)")]
    DegeneratePoint,

    /// Optimizer produced a non-finite iterate.
    #[error("optimizer diverged: non-finite theta after {0} steps")]
    OptimizerDiverged(usize),

    /// Exact assignment solver refused an instance larger than its cap.
    #[error("assignment instance too large: N = {n} exceeds cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
