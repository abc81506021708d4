use thiserror::Error;

/// Errors produced by the algebra layers.
///
/// `Validation` covers inputs that violate an algebraic axiom (A-infinity
/// relations, Maurer-Cartan, subcomplex closure); `Invariant` is reserved
/// for internal consistency checks such as a differential failing to square
/// to zero after construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error at token {position} ({token:?}): {message}")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
