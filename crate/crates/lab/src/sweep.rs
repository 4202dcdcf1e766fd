//! Batch runs over conditions × seeds × initial conditions.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use swarmchem::eco::Condition;
use swarmchem::metrics::{condition_summary, summary_csv, RunSeries, SUMMARY_WINDOW};

use crate::config::{InitSpec, RunConfig};
use crate::run::{run_with_metrics, RunOptions, DEFAULT_SNAPSHOT_INTERVAL};
use crate::{write_atomic, LabError};

pub const SWEEP_FILE: &str = "sweep.json";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub conditions: Vec<Condition>,
    pub seeds: Vec<u64>,
    pub inits: Vec<InitSpec>,
    pub steps: u64,
    pub snap_every: u64,
    /// Base config; its preset and init are replaced per run.
    pub base: RunConfig,
    /// Averaging window for the summary; `None` picks the default window,
    /// or the whole run when the run ends before the default window starts.
    pub window: Option<(u64, u64)>,
}

impl SweepOptions {
    pub fn new(conditions: Vec<Condition>, seeds: Vec<u64>, inits: Vec<InitSpec>, steps: u64) -> Self {
        Self {
            conditions,
            seeds,
            inits,
            steps,
            snap_every: DEFAULT_SNAPSHOT_INTERVAL,
            base: RunConfig::default(),
            window: None,
        }
    }

    pub fn effective_window(&self) -> (u64, u64) {
        self.window.unwrap_or(if self.steps >= SUMMARY_WINDOW.0 {
            SUMMARY_WINDOW
        } else {
            (0, self.steps)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub run_id: String,
    pub condition: String,
    pub init: String,
    pub seed: u64,
    /// Run directory relative to the sweep directory.
    pub dir: String,
    pub status: RunStatus,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub steps: u64,
    pub snapshot_interval: u64,
    pub window: (u64, u64),
    pub runs: Vec<SweepRun>,
    pub summary_csv: String,
}

impl SweepManifest {
    pub fn completed(&self) -> usize {
        self.runs.iter().filter(|r| r.status == RunStatus::Completed).count()
    }
}

/// Runs the cartesian product in parallel. A failing run is recorded and
/// the others continue; the summary has one row per completed run.
pub fn sweep(opts: &SweepOptions, out: &Path) -> Result<SweepManifest, LabError> {
    if opts.conditions.is_empty() || opts.seeds.is_empty() || opts.inits.is_empty() {
        return Err(LabError::Config("sweep needs at least one condition, seed and init".into()));
    }
    std::fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
    let window = opts.effective_window();

    let mut jobs = Vec::new();
    for &cond in &opts.conditions {
        for init in &opts.inits {
            for &seed in &opts.seeds {
                jobs.push((cond, init.clone(), seed));
            }
        }
    }

    let results: Vec<(SweepRun, Option<RunSeries>)> = jobs
        .into_par_iter()
        .map(|(cond, init, seed)| {
            let run_id = format!("{}-{}-s{}", cond.name(), init.label(), seed);
            let mut config = opts.base.clone();
            config.eco = cond.config();
            config.preset = Some(cond);
            config.init = init.clone();
            let run_opts = RunOptions {
                seed,
                steps: opts.steps,
                snap_every: opts.snap_every,
                run_id: Some(run_id.clone()),
            };
            let outcome = run_with_metrics(&config, &run_opts, &out.join(&run_id));
            let mut record = SweepRun {
                run_id: run_id.clone(),
                condition: cond.name().into(),
                init: init.to_string(),
                seed,
                dir: run_id.clone(),
                status: RunStatus::Completed,
                error: None,
            };
            match outcome {
                Ok((_, rows)) => (
                    record,
                    Some(RunSeries {
                        condition: cond.name().into(),
                        run_id,
                        rows,
                    }),
                ),
                Err(e) => {
                    record.status = RunStatus::Failed;
                    record.error = Some(e.to_string());
                    (record, None)
                }
            }
        })
        .collect();

    let series: Vec<RunSeries> = results.iter().filter_map(|(_, s)| s.clone()).collect();
    let rows = condition_summary(&series, window)?;
    write_atomic(&out.join(SUMMARY_FILE), summary_csv(&rows).as_bytes())?;

    let manifest = SweepManifest {
        steps: opts.steps,
        snapshot_interval: opts.snap_every,
        window,
        runs: results.into_iter().map(|(r, _)| r).collect(),
        summary_csv: SUMMARY_FILE.into(),
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_atomic(&out.join(SWEEP_FILE), &json)?;
    Ok(manifest)
}
