use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension out of range: n = {0}, supported range is 1..={max}", max = crate::bitword::MAX_N)]
    DimensionOutOfRange(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("word value {value:#x} does not fit in {n} bits")]
    ValueOutOfRange { n: usize, value: u32 },

    #[error("coordinate {coord} out of range 1..={n}")]
    CoordOutOfRange { n: usize, coord: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("table of length {len} is not of size 2^n for n = {n}")]
    TableSize { n: usize, len: usize },

    #[error("not a bijection: value {value:#x} appears more than once")]
    NotABijection { value: u32 },

    #[error("resource guard: {what} requires n <= {limit}, got n = {n} (raise the limit to override)")]
    ResourceGuard {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("enumeration too large: family has {size} members, limit is {limit}")]
    EnumerationTooLarge { size: String, limit: u64 },

    #[error("translation parts must have weights of equal parity")]
    ParityViolation,

    #[error("family requires n {expected}, got n = {n}")]
    WrongResidue { expected: &'static str, n: usize },

    #[error("illegal parameter combination: {0}")]
    IllegalCombination(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("map is not an isometry")]
    NotAnIsometry,

    #[error("map is not expressible with even-isometry parameters")]
    NotEvenIsometry,

    #[error("map is not a sigma mapping")]
    NotSigmaIJ,

    #[error("recovery needs n >= 3; use exhaustive matching for n <= 2")]
    SmallDimension,

    #[error("extended map does not stabilize the embedded subcube")]
    DoesNotStabilize,

    #[error("distance set P must be nonempty")]
    EmptyP,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotABijection { .. } => 3,
            Error::VerificationFailed(_) => 4,
            Error::ResourceGuard { .. } | Error::EnumerationTooLarge { .. } => 5,
            _ => 2,
        }
    }
}
