use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: transform on {left} states composed with transform on {right} states")]
    SizeMismatch { left: usize, right: usize },

    #[error("state {state} out of range for {states} states")]
    StateOutOfRange { state: usize, states: usize },

    #[error("a state machine needs at least one state")]
    NoStates,

    #[error("a state machine needs at least one input")]
    NoGenerators,

    #[error("duplicate input label `{0}`")]
    DuplicateInput(String),

    #[error("expected {expected} state names, got {actual}")]
    StateNameCount { expected: usize, actual: usize },

    #[error("closure limit must be at least 1")]
    InvalidLimit,

    #[error("closure exceeds the limit of {limit} elements ({partial} enumerated so far)")]
    BudgetExceeded { limit: usize, partial: usize },

    #[error("element {0} is not idempotent")]
    NotIdempotent(usize),

    #[error("idempotents {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("idempotents {0} and {1} are not equivalent")]
    NotEquivalent(usize, usize),

    #[error("element index {index} out of range for a closure of {size} elements")]
    NoSuchElement { index: usize, size: usize },

    #[error("closure is not simple: rank spectrum {spectrum}")]
    NotSimple { spectrum: String },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}
