//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameters (grid sizes, config values).
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request exceeds a hard resource limit (e.g. dense mode on a large grid).
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Operation not available in the current operator mode.
    #[error("capability error: {0}")]
    Capability(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
