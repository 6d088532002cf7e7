use std::fmt;

use gaussqkd::Error;

/// Failure classes, one per process exit code.
#[derive(Debug)]
pub enum CliError {
    /// A verification suite failed or an internal check tripped (exit 1).
    Check(String),
    /// Bad or inconsistent flags (exit 2).
    Usage(String),
    /// Parameters describe an unphysical state or channel (exit 3).
    Unphysical(String),
    /// File system trouble (exit 4).
    Io(String),
    /// The key rate keeps one sign over the whole bracket (exit 5).
    NoThreshold(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Unphysical(_) => 3,
            CliError::Io(_) => 4,
            CliError::NoThreshold(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Check(m) | CliError::Usage(m) | CliError::Unphysical(m) | CliError::Io(m) => f.write_str(m),
            CliError::NoThreshold(m) => write!(f, "no threshold: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unphysical { .. } => CliError::Unphysical(e.to_string()),
            Error::NoSignChange(s) => CliError::NoThreshold(s.to_string()),
            other => CliError::Check(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
