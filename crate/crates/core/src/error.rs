use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("alphabet mismatch: expected {{{expected}}}, found {{{found}}}")]
    AlphabetMismatch { expected: String, found: String },

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("letter `{0}` has an empty image (erasing morphisms are not supported)")]
    Erasing(String),

    #[error("occurrence counting needs a non-empty pattern")]
    EmptyPattern,

    #[error("level {level} out of range (materializable depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("coverage condition violated: input has length bound {have}, need {need}")]
    Coverage { need: usize, have: usize },

    #[error("depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("infeasible at level {level}: {reason}")]
    Infeasible { level: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by running out of materializable depth, table
    /// length or fixed-width integer range, as opposed to malformed input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::DepthExhausted(_)
                | Error::Coverage { .. }
                | Error::LevelOutOfRange { .. }
                | Error::Overflow(_)
        )
    }
}
