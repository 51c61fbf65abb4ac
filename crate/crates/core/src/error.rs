use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not positive definite (largest jitter tried: {max_jitter:e})")]
    NotPositiveDefinite { max_jitter: f64 },

    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("label at index {index} is {value}, expected -1 or +1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("training labels must contain both classes")]
    NoBothClasses,

    #[error("main features have {main} rows but privileged features have {privileged}")]
    AlignmentError { main: usize, privileged: usize },

    #[error("dataset contains a single class")]
    SingleClassDataset,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("indices are not strictly increasing at line {line}")]
    NonMonotonicIndices { line: usize },

    #[error("file contains no examples")]
    EmptyFile,

    #[error("privileged file has {found} lines, expected {expected}")]
    LineCountMismatch { expected: usize, found: usize },

    #[error("corpus has no non-empty document")]
    EmptyCorpus,

    #[error("class {class} has {available} examples, need at least {required}")]
    InsufficientClassSize {
        class: i64,
        available: usize,
        required: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
