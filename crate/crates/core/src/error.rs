use thiserror::Error;

/// Errors raised by the simplex solvers and their building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty face")]
    EmptyFace,

    #[error("face index {index} out of range for dimension {dim}")]
    FaceIndexOutOfRange { index: usize, dim: usize },

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric: |Q[{row}][{col}] - Q[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("no pivot: N(x) and J(x) do not intersect")]
    NoPivot,

    #[error("objective overflow")]
    ObjectiveOverflow,

    #[error("line search failure after {backtracks} backtracks (alpha = {alpha:e})")]
    LineSearchFailure { backtracks: usize, alpha: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
