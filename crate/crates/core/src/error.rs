use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate or value")]
    NonFinite,
    #[error("empty point set")]
    Empty,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vertex {index} has negative coordinate {value}; translate the body into the positive orthant first")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("degenerate body: volume must be positive")]
    DegenerateBody,
    #[error("node {node} lies {excess:e} above the convex envelope of the data")]
    NonConvex { node: usize, excess: f64 },
    #[error("duplicate nodes {first} and {second}")]
    DuplicateNode { first: usize, second: usize },
    #[error("functions do not share the same body dimension and node grid")]
    IncompatibleGrids,
    #[error("the asymptotic bodies do not intersect")]
    EmptyIntersection,
    #[error("singularity envelope did not stabilize after {doublings} doublings (last change {change:e})")]
    NoStabilization { doublings: usize, change: f64 },
    #[error("total mass {found} differs from the required {expected}")]
    MassMismatch { expected: f64, found: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("volume polynomial fit residual {residual:e} exceeds {threshold:e}")]
    FitResidual { residual: f64, threshold: f64 },
    #[error("node grid does not cover the region")]
    GridDoesNotCover,
}

pub type Result<T> = std::result::Result<T, Error>;
