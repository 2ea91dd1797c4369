use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] pindex_core::Error),
    #[error("{failed} of {reps} replications failed (limit 5%); first failure: {first}")]
    Study {
        failed: usize,
        reps: usize,
        first: String,
    },
    #[error("thread pool: {0}")]
    Runtime(String),
    #[error("output: {0}")]
    Output(String),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Core(e) => e.category(),
            Error::Study { .. } => "study",
            Error::Runtime(_) => "runtime",
            Error::Output(_) => "output",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Core(pindex_core::Error::Parameter(msg.into()))
}
