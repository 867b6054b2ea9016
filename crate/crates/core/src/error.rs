use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants are grouped by how a caller should react: `Input`,
/// `Constraint`, `Unsupported` and `PoleProximity` mean the request itself is
/// wrong, `Divergence` and `Precision` mean the numerics could not deliver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("pole proximity: {0}")]
    PoleProximity(String),
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("region spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn constraint<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Constraint(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(msg.into()))
}
