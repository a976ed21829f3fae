use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("structure check failed: {0}")]
    CheckFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
