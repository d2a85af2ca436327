use thiserror::Error;

/// Errors raised by constructors and operations in this crate.
///
/// Operations that *verify* something never fail because a verification
/// failed; they return a report whose checks carry the pass/fail bits.
/// These variants cover malformed input only.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid block algebra: {0}")]
    InvalidAlgebra(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not unital: {0}")]
    NonUnital(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid action spec: {0}")]
    InvalidAction(String),
    #[error("invalid projection: {0}")]
    InvalidProjection(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("point budget of {budget} exceeded ({reached} points)")]
    PointBudgetExceeded { budget: usize, reached: usize },
    #[error("no density stage found within {max_steps} steps")]
    DensityNotReached { max_steps: usize },
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
