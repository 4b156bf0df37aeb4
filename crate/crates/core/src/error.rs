use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point does not belong to the space it was handed to.
    #[error("representation error: {0}")]
    Representation(String),
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("ball intersection is empty")]
    LensEmpty,
    #[error("space has no metric midpoints")]
    NoMidpoint,
    /// A hypothesis required by the operation is not met.
    #[error("refused: {0}")]
    Refused(String),
}
