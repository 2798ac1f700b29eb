use thiserror::Error;

/// Crate-wide error type.
///
/// `Domain` covers precondition violations (bad caller input), `Validation`
/// covers identity checks that fail because a parameter is outside the range
/// where a splitting identity holds (the message names the smallest admissible
/// value when one is known), and `Construction` flags a broken postcondition,
/// which indicates a bug rather than bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base: q must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("construction postcondition failed (this is a bug): {0}")]
    Construction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI maps this error to: 1 for bad input, 2 for a failed
    /// verification or internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidBase(_) | Error::Domain(_) | Error::Parse(_) => 1,
            _ => 2,
        }
    }
}
