use std::io;

use thiserror::Error;

/// Errors raised anywhere in the tagging pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file does not follow its format.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A tag that is not part of the active tagset.
    #[error("line {line}: tag `{tag}` is not in the tagset")]
    UnknownTag { line: usize, tag: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Training produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Unsupported or corrupt lexicon/model file.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}
