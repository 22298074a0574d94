use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("record {id}: character {ch:?} is not in the {alphabet} alphabet")]
    OutOfAlphabet {
        id: String,
        ch: char,
        alphabet: String,
    },

    #[error("record {id}: sequence length {sequence} != structure length {structure}")]
    LengthMismatch {
        id: String,
        sequence: usize,
        structure: usize,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid segmentation: {0}")]
    InvalidSegmentation(String),

    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),

    #[error("sequence too long for enumeration: {len} > {max}")]
    TooLong { len: usize, max: usize },

    #[error("token {0:?} is neither a lexicon word nor an alphabet symbol")]
    UnknownToken(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures that indicate a bug rather than bad input.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
