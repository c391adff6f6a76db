use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("moment fit undefined: {0}")]
    Fit(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("design infeasible: {0}")]
    Design(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
