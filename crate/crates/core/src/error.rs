use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("argument {slot} has weight {found}, operator expects {expected}")]
    WeightMismatch {
        slot: usize,
        expected: String,
        found: String,
    },

    #[error("slot {slot} is out of range for an operator of arity {arity}")]
    InvalidSlot { slot: usize, arity: usize },

    #[error("invalid permutation {0:?}")]
    Permutation(Vec<usize>),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),

    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
        }
    }
}
