use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid code length {0}: not a supported power of two")]
    InvalidLength(usize),

    #[error("information count {k} out of range for length {n}")]
    InvalidInfoCount { n: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("rate re-allocation is infeasible: segment {segment} is stuck with {k} information bits and no active candidate remains")]
    Infeasible { segment: usize, k: usize },

    #[error("layout contains BCH segments, which the plain SC decoder does not support")]
    BchLayout,

    #[error("node size {0} too large for exhaustive enumeration")]
    NodeTooLarge(usize),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}
