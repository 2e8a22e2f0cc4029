use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero polynomial has no sign partition")]
    ZeroPolynomial,
    #[error("enclosure width must be positive")]
    NonPositiveWidth,
    #[error("empty interval: {0}")]
    EmptyInterval(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arity mismatch: gate takes {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("candidate outside the comparison class: {0}")]
    ClassViolation(String),
    #[error("signal is not symmetric about 1/2 on [0,1]")]
    Asymmetric,
    #[error("degree {degree} exceeds the allowed {limit}")]
    DegreeTooLarge { degree: usize, limit: usize },
    #[error("sample count {n} is below the required {required}")]
    BelowThreshold { n: u64, required: u64 },
    #[error("empty search space")]
    EmptySearchSpace,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
