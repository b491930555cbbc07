use thiserror::Error;

/// Errors produced by the needle laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A value failed a construction invariant.
    #[error("construction error: {0}")]
    Construction(String),
    /// A search or root-find could not produce a feasible answer.
    #[error("search error: {0}")]
    Search(String),
    /// The operation is not defined for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A description file could not be parsed.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    pub fn search(msg: impl Into<String>) -> Self {
        Error::Search(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
