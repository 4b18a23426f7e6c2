use std::fmt;

/// A configuration problem tied to a key and, when known, a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    field: Option<String>,
    line: Option<usize>,
    message: String,
}

impl ConfigError {
    pub fn syntax(line: usize, message: impl Into<String>) -> Self {
        Self { field: None, line: Some(line), message: message.into() }
    }

    pub fn field(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self { field: Some(key.to_string()), line, message: message.into() }
    }

    pub fn field_name(&self) -> Option<&str> {
        self.field.as_deref()
    }

    pub fn line(&self) -> Option<usize> {
        self.line
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.field, self.line) {
            (Some(k), Some(l)) => write!(f, "`{k}` (line {l}): {}", self.message),
            (Some(k), None) => write!(f, "`{k}`: {}", self.message),
            (None, Some(l)) => write!(f, "line {l}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(ddsim::Error),
    #[error("invalid model: {0}")]
    Model(ddsim::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ddsim::Error> for CliError {
    fn from(e: ddsim::Error) -> Self {
        use ddsim::Error as E;
        match e {
            E::NoConvergence | E::ClusterAmbiguity { .. } | E::Overflow { .. } | E::NonFinite => CliError::Numerical(e),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    /// 0 success, 1 i/o, 2 configuration, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
