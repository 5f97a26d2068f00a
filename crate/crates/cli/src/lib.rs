//! Commands behind the `deq` binary: window limits, node tables, single
//! integrations of the benchmark cases and convergence sweeps.

use std::path::PathBuf;

use deq_core::QuadError;
use thiserror::Error;

mod integrate;
mod limits;
mod sweep;

pub use integrate::{cmd_integrate, IntegrateReport, IntegrateRequest, Stopping};
pub use limits::{cmd_limits, cmd_nodes, truncate_3, LimitsReport};
pub use sweep::{cmd_converge, read_csv, write_csv, ConvergeRequest, Method, Sweep, SweepRecord};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Quad(#[from] QuadError),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", .path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl CliError {
    /// 2 for bad input, 3 when a tolerance was not met, 4 for an unsupported
    /// model and 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Quad(e) => match e {
                QuadError::NotConverged(_) => 3,
                QuadError::UnsupportedModel(_) => 4,
                QuadError::InvalidArgument(_)
                | QuadError::UnknownCase(_)
                | QuadError::OrderExceedsMax { .. }
                | QuadError::WindowExceeded { .. }
                | QuadError::DimensionMismatch { .. } => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
