use thiserror::Error;

use crate::quadrature::Estimate;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported dimension {0} (general polytopes support n in 2..=4)")]
    UnsupportedDimension(usize),
    #[error("halfspace intersection is unbounded")]
    UnboundedRegion,
    #[error("halfspace intersection is empty")]
    EmptyRegion,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadrature budget exceeded (best estimate {:.3e} +/- {:.3e})", partial.value, partial.error_bound)]
    BudgetExceeded { partial: Estimate },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
