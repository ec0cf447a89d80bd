use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level {level} requested but the diagram is finite with {available} levels")]
    FiniteDiagramExhausted { level: usize, available: usize },

    #[error("invalid prefix: {0}")]
    InvalidPrefix(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("diagram mismatch: {0}")]
    DiagramMismatch(String),

    #[error("prefix of length {len} does not sit at a level of the level map")]
    PrefixLengthMismatch { len: usize },

    #[error("no extension rule for max path: {0}")]
    MaxPathNoExtension(String),

    #[error("path is not extreme: {0}")]
    NotExtreme(String),

    #[error("diagram is not of rank two: {0}")]
    NotRank2(String),

    #[error("no rank-two pattern found: {0}")]
    PatternMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("path count overflow at level {0}")]
    CountOverflow(usize),

    #[error("validation failed:\n{0}")]
    Validation(ValidationReport),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
