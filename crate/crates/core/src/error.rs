use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("indices must be distinct")]
    IndicesNotDistinct,

    #[error("non-finite coefficient or argument")]
    NonFinite,

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },

    #[error("zero polynomial not admitted here")]
    ZeroPolynomial,

    #[error("polynomial is not real-rooted")]
    NotRealRooted,

    #[error("degenerate roots: collision within {tolerance:e}")]
    DegenerateRoots { tolerance: f64 },

    #[error("polynomial has non-real coefficients")]
    NotReal,

    #[error("polynomial is not multiaffine")]
    NotMultiaffine,

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("negative coefficient {value:e} beyond tolerance")]
    NegativeCoefficient { value: f64 },

    #[error("degree bound violated: {0}")]
    DegreeBound(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not {0}")]
    MatrixCondition(&'static str),

    #[error("construction cannot be certified: {0}")]
    NotCertifiable(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
