use thiserror::Error;

/// Errors reported by constructors and fallible operations.
///
/// Functions that only consume already-validated domain types are infallible
/// and do not appear here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input multiset is empty")]
    EmptyInput,
    #[error("weight at index {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("weight at index {index} leaves no headroom for internal node weights")]
    WeightOutOfRange { index: usize },
    #[error("weights are not in nondecreasing order")]
    NotSorted,
    #[error("exponent {exponent} outside fraction capacity {capacity}")]
    ExponentOutOfRange { exponent: u32, capacity: u32 },
    #[error("fraction capacities differ: {left} vs {right}")]
    CapacityMismatch { left: u32, right: u32 },
    #[error("depths violate the Kraft inequality")]
    KraftViolation,
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("symbol {index} has zero probability")]
    ZeroProbability { index: usize },
    #[error("symbol {index} has a negative probability")]
    NegativeProbability { index: usize },
    #[error("probabilities sum to {sum}, expected 1")]
    BadProbabilitySum { sum: f64 },
    #[error("{n} symbols exceed the exhaustive search limit {max}")]
    TooManySymbols { n: usize, max: usize },
    #[error("need at least two symbols, got {n}")]
    TooFewSymbols { n: usize },
    #[error("bit stream does not decode to a whole number of codewords")]
    InvalidCodeStream,
    #[error("node {node} has invalid structure or references")]
    MalformedArena { node: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
