use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Bytes do not follow the expected file layout.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },
    /// Arguments violate an operation's preconditions.
    #[error("validation error: {0}")]
    Validation(String),
    /// Scene generation could not place the requested geometry.
    #[error("capacity error: {0}")]
    Capacity(String),
}

impl Error {
    pub(crate) fn format(offset: usize, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    pub(crate) fn dimension_mismatch(
        what_a: &str,
        a: (usize, usize),
        what_b: &str,
        b: (usize, usize),
    ) -> Self {
        Error::Validation(format!(
            "dimension mismatch: {what_a} is {}x{}, {what_b} is {}x{}",
            a.0, a.1, b.0, b.1
        ))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
