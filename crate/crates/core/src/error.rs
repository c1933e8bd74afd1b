use thiserror::Error;

/// Errors produced by the spectrum toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime; only prime fields F_q are supported")]
    NotPrime(u64),

    #[error("zero has no multiplicative inverse")]
    InverseOfZero,

    #[error("element {value} is out of range for F_{q}")]
    ElementOutOfRange { value: u64, q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sequence must be nonempty")]
    EmptySequence,

    #[error("set must be nonempty")]
    EmptySet,

    #[error("sequences in a set must share length {expected}, found {found}")]
    RaggedSet { expected: usize, found: usize },

    #[error("{what} requires enumerating {size} items, above the limit of {limit}")]
    EnumerationLimit { what: &'static str, size: u128, limit: u128 },

    #[error("conditioning on type {0:?} which has zero probability")]
    ZeroProbabilityCondition(Vec<u32>),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("side condition violated: O({symbol}) = 0 while P({symbol}) > 0")]
    SideCondition { symbol: usize },

    #[error(
        "no full-rank transform found after {tries} tries (each try succeeds with probability > {bound:.4})"
    )]
    MaxTriesExhausted { tries: usize, bound: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("at least two trials are required, got {0}")]
    TooFewTrials(usize),

    #[error("input is the zero vector; a linear code maps it to zero with certainty")]
    ZeroInput,

    #[error("no admissible (P, Q) pair has positive expected spectrum")]
    EmptySupport,

    #[error("outer code violates the weight condition, witness input {witness:?}")]
    OuterConditionViolated { witness: Vec<u32> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
