//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{f} exceeds 2^16")]
    OrderOverflow { p: u64, f: u32 },
    #[error("no irreducible modulus of degree {0} found (internal)")]
    NoModulus(u32),
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("negative weight at element index {0}")]
    NegativeWeight(u32),
    #[error("weights sum to {sum}, not 1 (tolerance {tol})")]
    WeightSum { sum: f64, tol: f64 },
    #[error("{what} budget exceeded: needs {needs}, budget {budget}")]
    Budget {
        what: &'static str,
        needs: u128,
        budget: u128,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix must be square for determinant ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("division by zero in F_q")]
    DivisionByZero,
    #[error("conditioning event has probability zero")]
    ZeroConditioning,
    #[error("resample cap {cap} exhausted at column {k}")]
    ResampleCap { cap: u64, k: usize },
    #[error("subgroup must be non-trivial")]
    TrivialSubgroup,
    #[error("empty set not allowed for {0}")]
    EmptySet(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
