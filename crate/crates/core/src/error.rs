use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed a configured size cap.
    #[error("{what} requires {requested} entries, exceeding the cap of {cap}")]
    Resource {
        what: &'static str,
        requested: String,
        cap: u64,
    },

    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(what: &'static str, requested: impl ToString, cap: u64) -> Self {
        Error::Resource {
            what,
            requested: requested.to_string(),
            cap,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
