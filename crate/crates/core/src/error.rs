use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("duplicate constituent hypothesis `{0}`")]
    DuplicateConstituent(String),

    #[error("family has no constituent hypotheses")]
    EmptyFamily,

    #[error("invalid hypothesis id: {0}")]
    InvalidId(String),

    #[error("invalid battery: {0}")]
    InvalidBattery(String),

    #[error("invalid method: {0}")]
    InvalidMethod(String),

    #[error("invalid alpha configuration: {0}")]
    InvalidAlphaConfig(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
