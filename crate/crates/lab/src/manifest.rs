//! Run manifests: the last file written into a run directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{write_atomic, LabError};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT: u32 = 1;

/// Everything needed to locate a run's outputs and to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: u32,
    pub run_id: String,
    pub condition: String,
    pub seed: u64,
    pub config: RunConfig,
    /// Text of the designed initial recipe, recorded so the run does not
    /// depend on the recipe file staying unchanged.
    pub init_recipe: Option<String>,
    pub start_step: u64,
    pub end_step: u64,
    pub snapshot_interval: u64,
    /// Relative to the run directory.
    pub snapshot_dir: String,
    pub snapshots: Vec<String>,
    pub metrics_csv: Vec<String>,
    pub checkpoint: String,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf, LabError> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_vec_pretty(self).expect("manifest serializes");
        write_atomic(&path, &json)?;
        Ok(path)
    }

    /// Reads a run directory's manifest. A directory without one holds an
    /// incomplete run.
    pub fn load(dir: &Path) -> Result<Self, LabError> {
        let path = dir.join(MANIFEST_FILE);
        let bytes = std::fs::read(&path).map_err(|e| LabError::io(&path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    /// Config with the recorded initial recipe substituted for the original
    /// init source, written to `dir` when needed.
    pub fn replay_config(&self, dir: &Path) -> Result<RunConfig, LabError> {
        let mut cfg = self.config.clone();
        if let Some(text) = &self.init_recipe {
            let path = dir.join("init.recipe");
            write_atomic(&path, text.as_bytes())?;
            cfg.init = crate::InitSpec::File(path);
        }
        Ok(cfg)
    }
}
