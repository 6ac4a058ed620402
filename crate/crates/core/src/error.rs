use thiserror::Error;

/// Errors produced by the coreset constructions and their supporting numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoresetError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight {weight} at index {index} is not strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("weighted variance {variance:e} is below the degeneracy threshold")]
    DegenerateVariance { variance: f64 },

    #[error("point {index} has norm {norm} > 1, outside the unit ball")]
    UnitBallViolation { index: usize, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobi SVD did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("tail singular block has Frobenius norm {norm:e}; the input has rank at most k")]
    RankTooLow { norm: f64 },

    #[error("stream is empty")]
    EmptyStream,
}

pub type Result<T> = std::result::Result<T, CoresetError>;

pub(crate) fn check_epsilon(name: &'static str, eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CoresetError::InvalidParameter {
            name,
            reason: format!("must lie in (0, 1), got {eps}"),
        })
    }
}
