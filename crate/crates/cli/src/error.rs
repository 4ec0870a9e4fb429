use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flags or input files (exit 2).
    Config(String),
    /// A numerical routine failed (exit 3).
    Numeric(String),
    /// A memory budget or similar limit was exceeded (exit 4).
    Resource(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Resource(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

impl From<monowave::Error> for CliError {
    fn from(e: monowave::Error) -> Self {
        use monowave::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidArgument(_) | E::UnsupportedDimension(_) | E::NonScattering(_) | E::Format(_) | E::Io(_) => {
                CliError::Config(msg)
            }
            E::MemoryBudget { .. } => CliError::Resource(msg),
            E::OrderTooLarge { .. } | E::QuadratureNotConverged { .. } | E::Degenerate(_) => CliError::Numeric(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
