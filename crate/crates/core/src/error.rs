use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("letter {letter} out of range for a {strands}-strand braid")]
    LetterOutOfRange { letter: i64, strands: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("braid has {crossings} crossings, above the limit of {limit}")]
    SizeLimit { crossings: usize, limit: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code for the command line: 1 input, 2 internal, 3 size.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::LetterOutOfRange { .. } | Error::Input(_) => 1,
            Error::Invariant(_) => 2,
            Error::SizeLimit { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
