use thiserror::Error;

/// Errors raised by the algebraic, signature and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("letter {letter} outside the alphabet 1..={d}")]
    LetterOutOfRange { letter: usize, d: usize },

    #[error("{what}: {requested} coefficients exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: usize,
    },

    #[error(
        "shape mismatch: (d={left_d}, depth={left_depth}) vs (d={right_d}, depth={right_depth})"
    )]
    ShapeMismatch {
        left_d: usize,
        left_depth: usize,
        right_d: usize,
        right_depth: usize,
    },

    #[error("requested level {requested} exceeds tensor depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },

    #[error("not invertible: π₀(a) = 0")]
    NotInvertible,

    #[error("exp requires π₀(a) = 0")]
    ExpDomain,

    #[error("log requires π₀(a) = 1")]
    LogDomain,

    #[error("expected level-0 entry equal to {expected}")]
    LevelZero { expected: &'static str },

    #[error("coefficient count {got} does not match d={d}, depth={depth}")]
    BadLength { got: usize, d: usize, depth: usize },

    #[error("non-finite coefficient at flat index {0}")]
    NonFinite(usize),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid interval [{s}, {t}]")]
    InvalidInterval { s: f64, t: f64 },

    #[error("Hölder exponent {0} outside (0, 1)")]
    ExponentOutOfRange(f64),

    #[error("{0}")]
    TooFewSamples(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not weakly geometric: grid point {index} fails the shuffle identity (residual {residual:e})")]
    NotWeaklyGeometric { index: usize, residual: f64 },

    #[error("Young regularity condition fails: {0}")]
    Regularity(String),

    #[error("CSV line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("JSON: {0}")]
    Json(String),

    #[error("I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
