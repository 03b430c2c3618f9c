use thiserror::Error;

/// Errors raised by field construction, evaluation, extraction and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point:?} lies outside the field domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modes do not share one eigenvalue: {0}")]
    MixedEigenvalues(String),

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("non-positive weight {value} at {point:?}")]
    NonPositiveWeight { value: f64, point: Vec<f64> },

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("empty domain")]
    EmptyDomain,

    #[error("degenerate value range [{lo}, {hi}]")]
    DegenerateRange { lo: f64, hi: f64 },

    #[error("no regular points found after {0} trials")]
    NoRegularPoints(usize),

    #[error("level {0} is flagged as near-critical")]
    NearCritical(f64),

    #[error("the slab between the two levels is empty")]
    EmptySlab,

    #[error("cannot parse number {0:?}")]
    Parse(String),

    #[error("field specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
