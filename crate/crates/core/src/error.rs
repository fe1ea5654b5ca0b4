use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid<T>(name: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidParameter {
        name,
        reason: reason.into(),
    })
}

pub(crate) fn numerical<T>(reason: impl Into<String>) -> Result<T> {
    Err(LabError::Numerical(reason.into()))
}
