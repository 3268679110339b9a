use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree sequence is not graphical")]
    NotGraphical,

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("node {node}: upper bound {upper} exceeds n - 1 = {max}")]
    BoundExceeded { node: usize, upper: usize, max: usize },

    #[error("degenerate density: mean degree puts mu at {mu}")]
    DegenerateDensity { mu: f64 },

    #[error("degree sum {got} does not match 2m = {expected}")]
    SumMismatch { expected: usize, got: usize },

    #[error("vectors have differing coordinate sums")]
    MixedSums,

    #[error("weight at index {index} is not positive")]
    NotPositive { index: usize },

    #[error("{what} too large: {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },

    #[error("state {state} violates the kernel constraints")]
    Mismatch { state: usize },

    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("chain is not reversible at ({from}, {to})")]
    NotReversible { from: usize, to: usize },

    #[error("no sample hit the subset on ladder rung {rung}")]
    ZeroHits { rung: usize },

    #[error("ladder step {step} has a single raisable coordinate")]
    OddResidue { step: usize },

    #[error("no transform within budget {budget}")]
    NotFound { budget: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
