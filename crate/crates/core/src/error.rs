use thiserror::Error;

/// Errors reported by the coding and simulation primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A structural parameter is outside its legal range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested payload does not fit the dictionary.
    #[error("insufficient capacity: {0}")]
    Capacity(String),

    /// A decoded selection does not map back to any message.
    #[error("decoded selection is outside the message index space: {0}")]
    DecodeInvalid(String),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
