use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("pole of the Gamma function at {nearest}")]
    Pole { nearest: i64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
