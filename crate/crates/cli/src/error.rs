use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Every problem found while validating the command line.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] pindex_core::Error),
    #[error(transparent)]
    Sim(#[from] pindex_sim::Error),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Io(_) => "io",
            CliError::Core(e) => e.category(),
            CliError::Sim(e) => e.category(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "usage" | "config" | "parameter" => 2,
            "data" => 3,
            "selection" | "diagnostic" => 4,
            "study" | "runtime" => 5,
            _ => 6,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> String {
        let problems = match self {
            CliError::Config(p) => p.clone(),
            other => vec![other.to_string()],
        };
        json!({
            "error": {
                "category": self.category(),
                "message": self.to_string(),
                "problems": problems,
            }
        })
        .to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
