use thiserror::Error;

/// Errors surfaced by the exact-arithmetic pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid slope: {0}")]
    InvalidSlope(String),

    #[error("continued fraction tail evaluates to zero (division by zero)")]
    ZeroTail,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not characteristic for this lattice")]
    NotCharacteristic,

    #[error("vector is not short (not a norm minimiser in its class)")]
    NotShort,

    #[error("vector lies outside the short-vector region of the lattice")]
    NotInShortRegion,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("brute-force bound exceeded: p = {p} > {bound}")]
    BoundExceeded { p: u64, bound: u64 },

    #[error("coefficients violate the changemaker condition")]
    ChangemakerViolation,

    #[error("norm mismatch: |w0|^2 = {norm} but slope requires {required}")]
    NormMismatch { norm: i64, required: i64 },

    #[error("minimiser value {value} is not congruent to 0 mod 8; invalid changemaker input")]
    NotDivisibleBy8 { value: i64 },

    #[error("torsion sequence is not realizable by an L-space form polynomial")]
    NotRealizable,

    #[error("ambient rank {rank} exceeds the configured search bound {bound}")]
    RankBound { rank: usize, bound: usize },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
}

pub type Result<T> = std::result::Result<T, Error>;
