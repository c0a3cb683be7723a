use shallow_tunnel::error::TunnelError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config value out of range: {key} {msg}")]
    Range { key: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no artifacts found in {0}")]
    MissingArtifacts(PathBuf),
    #[error(transparent)]
    Solver(#[from] TunnelError),
    #[error("{failed} of {total} sweep cases failed")]
    SweepFailures { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 1 for solver failures, 2 for configuration and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) => match e {
                TunnelError::InvalidConfig(_) | TunnelError::DegenerateGeometry(_) => 2,
                _ => 1,
            },
            CliError::SweepFailures { .. } => 1,
            _ => 2,
        }
    }
}
