//! Command surface for the equilibrium solver: single-point solves,
//! regime-map sweeps, randomized verification and bargaining reports.
//!
//! All file I/O lives in this crate; the model itself is in `statecap-core`.

use thiserror::Error;

pub mod input;
pub mod report;
pub mod sampling;
pub mod sweep;
pub mod verify;

pub use report::{render_bargain, render_solve, solve_point, PointSolution};
pub use sweep::{run_sweep, Axis, SweepSpec, CSV_HEADER};
pub use verify::{run_verify, VerifyConfig, VerifyReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("{failures} property check(s) failed")]
    PropertyFailure { failures: usize },
}

impl CliError {
    /// Process exit status: 1 for bad input, 2 for failed property checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Input(_) => 1,
            CliError::PropertyFailure { .. } => 2,
        }
    }
}

/// Writes `text` to `path`.
pub fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
