use std::fmt;

/// A failure plus the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters (exit 2).
    Usage(String),
    /// The computation itself failed (exit 3).
    Numerical(String),
    /// Reading or writing files failed (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bayes_lasso::Error> for CliError {
    fn from(e: bayes_lasso::Error) -> Self {
        use bayes_lasso::Error as E;
        let msg = e.to_string();
        match e {
            E::Domain { .. } | E::InvalidParams { .. } | E::ZeroQuadratic { .. } | E::Config(_) => {
                CliError::Usage(msg)
            }
            E::MillsOverflow { .. } | E::NotPositiveDefinite { .. } | E::NonFinite { .. } => {
                CliError::Numerical(msg)
            }
            E::Parse { .. } | E::Csv(_) | E::Io(_) => CliError::Io(msg),
        }
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

pub type CliResult<T> = std::result::Result<T, CliError>;
