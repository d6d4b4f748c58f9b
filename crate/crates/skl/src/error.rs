//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by the leasing stack.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two operands that must agree in length did not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// A zero direction was asked to produce odd parity.
    #[error("empty coset: zero direction with parity 1")]
    EmptyCoset,
    /// A branch state violated its invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// Parameters failed validation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Bytes or bits could not be parsed.
    #[error("decode error: {0}")]
    Decode(String),
    /// A circuit was malformed.
    #[error("malformed circuit: {0}")]
    Circuit(String),
    /// A garbled table rejected the supplied labels.
    #[error("garbled evaluation failed at wire {0}")]
    GarbledEval(usize),
    /// A protocol message was structurally wrong or a party aborted.
    #[error("protocol error: {0}")]
    Protocol(String),
    /// The operation is not available under the current parameter preset.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
