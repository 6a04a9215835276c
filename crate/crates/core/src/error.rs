use thiserror::Error;

/// Errors raised by the library operations.
///
/// Variants fall in two families: malformed inputs (bad parameters, parse
/// failures) and precondition violations (a well-formed request the math
/// cannot serve). [`Error::is_precondition`] separates them for the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient digits: no 1 observed at or after position {position}")]
    InsufficientDigits { position: usize },

    #[error("block decomposition has no complete block")]
    EmptyDecomposition,

    #[error("q must be positive, got {0}")]
    NonPositiveQ(f64),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTol(f64),

    #[error("root bracket failure: {0}")]
    BracketFailure(String),

    #[error("alpha must be >= 1, got {0}")]
    AlphaBelowOne(f64),

    #[error("bad range: {0}")]
    BadRange(String),

    #[error("n = {n} exceeds t = {t} where 2^t <= W < 2^(t+1)")]
    NExceedsT { n: u32, t: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("growth function {psi} is not in the full-dimension regime for finite positive beta")]
    RegimeMismatch { psi: String },

    #[error("schedule infeasible at level {level}: word length {word_len} + m {m} exceeds gap {gap}")]
    ScheduleInfeasible {
        level: u64,
        word_len: u64,
        m: usize,
        gap: u64,
    },

    #[error("gamma must lie in [1/2, 1), got {0}")]
    GammaOutOfRange(f64),

    #[error("block period m must be >= 2, got {0}")]
    MBelowTwo(usize),

    #[error("growth function needs n >= 2, got {0}")]
    NBelowTwo(u64),

    #[error("operation requires a double-exponential growth function, got {0}")]
    WrongKind(String),

    #[error("undersampled: {samples} samples for depth {depth} (need at least {needed})")]
    Undersampled {
        samples: usize,
        depth: usize,
        needed: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by a well-formed request that violates a
    /// mathematical precondition (as opposed to a malformed argument).
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
