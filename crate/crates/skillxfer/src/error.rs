use std::fmt;
use std::io;
use std::path::PathBuf;

/// One invalid configuration field, addressed by its dotted path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{} invalid field(s)", .0.len())]
    Config(Vec<ConfigViolation>),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Anomaly(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config(vec![ConfigViolation {
            path: path.into(),
            message: message.into(),
        }])
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Anomaly(_) => 4,
        }
    }

    /// Stable prefix of every stderr line produced for this error.
    pub fn prefix(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "error[io]",
            CliError::Config(_) => "error[config]",
            CliError::Data(_) => "error[data]",
            CliError::Anomaly(_) => "error[anomaly]",
        }
    }

    /// The lines written to stderr: one per configuration violation,
    /// otherwise one.
    pub fn stderr_lines(&self) -> Vec<String> {
        match self {
            CliError::Config(vs) => vs.iter().map(|v| format!("{}: {v}", self.prefix())).collect(),
            other => vec![format!("{}: {other}", self.prefix())],
        }
    }
}

/// Core errors reaching the front end stem from inputs that passed
/// configuration checks, i.e. from data.
impl From<skillxfer_core::Error> for CliError {
    fn from(e: skillxfer_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
