use thiserror::Error;

/// Errors raised by the fitting, selection and index machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input data is malformed: non-finite values, length mismatches, ragged columns.
    #[error("data error: {0}")]
    Data(String),
    /// A configuration value is outside its valid range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// No admissible model could be selected.
    #[error("selection error: {0}")]
    Selection(String),
    /// The index cannot be formed for the selected model (for example an empty
    /// one-rank-less sub-model set).
    #[error("diagnostic error: {0}")]
    Diagnostic(String),
}

impl Error {
    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Data(_) => "data",
            Error::Parameter(_) => "parameter",
            Error::Selection(_) => "selection",
            Error::Diagnostic(_) => "diagnostic",
        }
    }

    /// The message without its category prefix.
    pub fn message(&self) -> &str {
        match self {
            Error::Data(m) | Error::Parameter(m) | Error::Selection(m) | Error::Diagnostic(m) => m,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
