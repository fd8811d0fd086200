use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] coordproj_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Machine-readable reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.reason(),
            CliError::Io { .. } => "IO",
            CliError::Parse { .. } => "PARSE",
            CliError::Usage(_) => "BAD_INPUT",
        }
    }

    /// 2 for validation errors, 3 for size caps, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(coordproj_core::Error::SizeCap { .. }) => 3,
            CliError::Io { .. } => 4,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
