use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent p = {p} outside the admissible open interval ({lower}, {upper})")]
    ExponentOutOfRange { p: f64, lower: f64, upper: f64 },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("weight exponent alpha = {0} must be positive")]
    BadAlpha(f64),
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("sample too close to the origin (|z| = {rho} below floor {floor})")]
    SingularSample { rho: f64, floor: f64 },
    #[error("bad resolution: {0}")]
    BadResolution(String),
    #[error("field does not satisfy its boundary tags: {0}")]
    BoundaryMismatch(String),
    #[error("initial guess has zero energy")]
    DegenerateInit,
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("doubled box changed the limit constant by {relative_change:.3e} (> 1%)")]
    TruncationUnstable { relative_change: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("interpolation point out of range: {0}")]
    InterpolationOutOfRange(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
