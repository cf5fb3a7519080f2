use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A Kraus pair or affine map fails the CPTP contract.
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// A density operator fails Hermiticity, unit trace or positivity.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Bad certifier configuration (non-positive grid step, zero budget, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Checkpoint does not belong to the problem it is resumed against.
    #[error("checkpoint config hash mismatch: expected {expected}, found {found}")]
    ConfigHashMismatch { expected: String, found: String },

    /// Malformed or unreadable checkpoint data.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
