use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern bank has no patterns")]
    NoPatterns,
    #[error("sequence length must be at least 1")]
    EmptySequence,
    #[error("word {word:?} uses a symbol outside the alphabet")]
    UnknownSymbol { word: String },
    #[error("empty word in pattern bank")]
    EmptyWord,
    #[error("override of {word:?} at start {start} does not fit in [1, {n}]")]
    OverrideOutOfRange { word: String, start: usize, n: usize },
    #[error("{operation} requires the {required} pattern system, got {actual}")]
    WrongVariant { operation: &'static str, required: &'static str, actual: String },
    #[error("{operation} requires every letter of the alphabet to be a pattern")]
    AlphabetNotClosed { operation: &'static str },
    #[error("algorithm {algorithm} cannot run under the {semiring} semiring: {reason}")]
    AlgorithmMismatch { algorithm: String, semiring: String, reason: String },
    #[error("{0} has a positive cost; use the general min-plus solver instead")]
    PositiveCost(String),
    #[error("the pattern bank has no word of length 1")]
    NoUnitWord,
    #[error("pattern cost {0} is not invertible")]
    NonInvertibleCost(String),
    #[error("model too large for enumeration: {size} labelings exceed the limit {limit}")]
    TooLarge { size: f64, limit: f64 },
    #[error("interval [{lo}, {hi}] is outside [1, {len}]")]
    IntervalOutOfRange { lo: usize, hi: usize, len: usize },
    #[error("node {descendant} is not a strict descendant of node {ancestor}")]
    NotDescendant { ancestor: usize, descendant: usize },
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("sampling step {step} has no candidate with positive mass")]
    InvalidSamplingStep { step: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Whether the error stems from user input rather than engine state.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Invariant(_) | Error::InvalidSamplingStep { .. })
    }
}
