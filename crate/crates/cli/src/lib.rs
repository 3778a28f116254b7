//! Scenario runner behind the `qdpl` binary: CSV tables, SVG plots and a JSON
//! run manifest.

pub mod plot;
pub mod run;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qdpl::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Csv { path: String, reason: String },

    #[error("verification failed: {failed} of {total} oracle draws exceed {tol:e} (worst {worst:.3e})")]
    Verify { failed: usize, total: usize, tol: f64, worst: f64 },

    #[error("convergence check failed: {0}")]
    Convergence(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 1 configuration, 2 numerics, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                qdpl::ErrorKind::Config => 1,
                qdpl::ErrorKind::Numerics => 2,
                qdpl::ErrorKind::Io => 3,
            },
            CliError::Usage(_) => 1,
            CliError::Verify { .. } | CliError::Convergence(_) => 2,
            CliError::Io { .. } | CliError::Csv { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
