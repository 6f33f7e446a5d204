use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lattice(#[from] kg_lattice::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("malformed output: {0}")]
    Parse(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lattice(kg_lattice::Error::Budget { .. }) => EXIT_BUDGET,
            CliError::Lattice(e) if e.is_usage() => EXIT_USAGE,
            CliError::Lattice(_) => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_IO,
            CliError::Parse(_) => EXIT_USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
