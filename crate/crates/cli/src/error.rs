use std::io;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bigenus::Error),

    #[error("{path}: {source}")]
    File { path: String, source: io::Error },

    /// The input file was read but its contents are not a valid graph.
    #[error("{path}: {source}")]
    Input {
        path: String,
        source: bigenus::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("reading existing results: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 2 for refusals (guards, budgets, bad parameters), 3 for I/O and
    /// unreadable input, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Core(e) if e.is_guard() => 2,
            CliError::Core(bigenus::Error::Io(_) | bigenus::Error::Parse { .. }) => 3,
            CliError::Core(_) => 1,
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::File { .. } | CliError::Input { .. } | CliError::Io(_) | CliError::Csv(_) => {
                3
            }
        };
        ExitCode::from(code)
    }
}
