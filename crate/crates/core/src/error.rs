use std::fmt;

use crate::chatlog::Speaker;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A malformed input record. `index` is the 0-based record position.
    #[error("record {index}: field `{field}`: {message}")]
    Record {
        index: usize,
        field: String,
        message: String,
    },

    #[error("duplicate session_id {0:?}")]
    DuplicateSession(String),

    #[error("no inter-turn gaps observed for responder {0}; use a larger corpus or explicit thresholds")]
    NoGaps(Speaker),

    #[error("empty encoding: session {0:?} has no word tokens")]
    EmptyEncoding(String),

    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: loss = {loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },

    #[error("{artifact} fingerprint mismatch: model expects {expected}, got {found}")]
    FingerprintMismatch {
        artifact: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short tag used in one-line CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Record { .. } => "record",
            Error::DuplicateSession(_) => "duplicate_session",
            Error::NoGaps(_) => "no_gaps",
            Error::EmptyEncoding(_) => "empty_encoding",
            Error::TokenOutOfRange { .. } => "token_out_of_range",
            Error::Shape(_) => "shape",
            Error::NonFinite(_) => "non_finite",
            Error::Diverged { .. } => "diverged",
            Error::FingerprintMismatch { .. } => "fingerprint_mismatch",
            Error::InvalidInput(_) => "invalid_input",
            Error::Format(_) => "format",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn record(index: usize, field: &str, message: impl fmt::Display) -> Self {
        Error::Record {
            index,
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}
