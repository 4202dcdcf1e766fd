//! Headless experiment runs, batch sweeps and the interactive session server.

pub mod config;
pub mod manifest;
pub mod protocol;
pub mod run;
pub mod server;
pub mod sweep;

use std::io;
use std::path::Path;

use thiserror::Error;

pub use config::{InitSpec, RunConfig};
pub use manifest::RunManifest;
pub use run::{run, RunOptions};
pub use sweep::{sweep, SweepManifest, SweepOptions, SweepRun};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("init: {0}")]
    Init(#[from] swarmchem::eco::InitError),
    #[error("metrics: {0}")]
    Metrics(#[from] swarmchem::metrics::MetricsError),
}

impl LabError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        LabError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Writes `bytes` next to `path` and renames it into place, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| LabError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| LabError::io(path, e))
}
