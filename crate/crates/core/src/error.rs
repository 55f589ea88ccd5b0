use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("code construction failed: {0}")]
    Construction(String),
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("malformed code file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Parameter(_) | Error::Shape(_) | Error::Format(_)
        )
    }
}
