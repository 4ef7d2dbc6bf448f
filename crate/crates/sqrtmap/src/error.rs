use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation needs a nonempty word")]
    EmptyWord,
    #[error("word too short: need at least {need} letters, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("cannot mix binary and block alphabets in one operation")]
    AlphabetMismatch,
    #[error("word is not a suffix of the given word")]
    NotSuffix,
    #[error("invalid letter {0:?}")]
    InvalidLetter(char),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no minimal square starts at position {position}")]
    NotSquareful { position: usize },
    #[error("word is not a product of minimal squares (stuck at position {position})")]
    NotInPi { position: usize },
    #[error("square root produced {0}, which is not a suffix of S or L")]
    LostSynchronization(String),
    #[error("source poisoned: {0}")]
    Poisoned(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
