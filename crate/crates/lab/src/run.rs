//! One headless ecological run.

use std::path::Path;

use swarmchem::eco::{make_initial_world, EcoSim};
use swarmchem::metrics::{metric_rows, metrics_csv, render_at, snapshot_file_name, write_ppm, MetricRow};

use crate::config::RunConfig;
use crate::manifest::{RunManifest, MANIFEST_FILE, MANIFEST_FORMAT};
use crate::{write_atomic, LabError};

pub const SNAPSHOT_DIR: &str = "snapshots";
pub const METRICS_FILE: &str = "metrics.csv";
pub const CHECKPOINT_FILE: &str = "final.checkpoint";
pub const DEFAULT_SNAPSHOT_INTERVAL: u64 = 500;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub steps: u64,
    pub snap_every: u64,
    /// Defaults to `<condition>-<init>-s<seed>`.
    pub run_id: Option<String>,
}

impl RunOptions {
    pub fn new(seed: u64, steps: u64) -> Self {
        Self {
            seed,
            steps,
            snap_every: DEFAULT_SNAPSHOT_INTERVAL,
            run_id: None,
        }
    }
}

/// Runs one simulation, writing snapshots at step 0 and every
/// `snap_every` steps, then the metric series, the final world state and
/// finally the manifest.
pub fn run(config: &RunConfig, opts: &RunOptions, out: &Path) -> Result<RunManifest, LabError> {
    run_with_metrics(config, opts, out).map(|(m, _)| m)
}

pub(crate) fn run_with_metrics(
    config: &RunConfig,
    opts: &RunOptions,
    out: &Path,
) -> Result<(RunManifest, Vec<MetricRow>), LabError> {
    config.validate()?;
    if opts.snap_every == 0 {
        return Err(LabError::Config("snapshot interval must be positive".into()));
    }
    let recipe = config.init.recipe()?;
    let kind = config.init.initial_kind()?;
    let world = make_initial_world(&kind, &config.world, opts.seed)?;

    let snap_dir = out.join(SNAPSHOT_DIR);
    std::fs::create_dir_all(&snap_dir).map_err(|e| LabError::io(&snap_dir, e))?;
    // a stale manifest would mark a half-rewritten directory as complete
    let stale = out.join(MANIFEST_FILE);
    if stale.exists() {
        std::fs::remove_file(&stale).map_err(|e| LabError::io(&stale, e))?;
    }

    let res = config.resolution;
    let mut sim = EcoSim::new(world, config.eco.clone());
    let mut bitmaps = Vec::new();
    let mut names = Vec::new();
    let mut snapshot = |sim: &EcoSim| -> Result<(), LabError> {
        let bmp = render_at(sim.world(), res, res);
        let name = snapshot_file_name(sim.time());
        let path = snap_dir.join(&name);
        write_ppm(&bmp, &path).map_err(|e| LabError::io(&path, e))?;
        names.push(format!("{SNAPSHOT_DIR}/{name}"));
        bitmaps.push(bmp);
        Ok(())
    };
    snapshot(&sim)?;
    while sim.time() < opts.steps {
        sim.step();
        if sim.time() % opts.snap_every == 0 {
            snapshot(&sim)?;
        }
    }

    let rows = metric_rows(&bitmaps);
    write_atomic(&out.join(METRICS_FILE), metrics_csv(&rows).as_bytes())?;
    write_atomic(&out.join(CHECKPOINT_FILE), sim.world().to_checkpoint().as_bytes())?;

    let init_label = config.init.label();
    let manifest = RunManifest {
        format: MANIFEST_FORMAT,
        run_id: opts
            .run_id
            .clone()
            .unwrap_or_else(|| format!("{}-{}-s{}", config.condition_name(), init_label, opts.seed)),
        condition: config.condition_name(),
        seed: opts.seed,
        config: config.clone(),
        init_recipe: recipe.map(|r| r.to_text()),
        start_step: 0,
        end_step: sim.time(),
        snapshot_interval: opts.snap_every,
        snapshot_dir: SNAPSHOT_DIR.into(),
        snapshots: names,
        metrics_csv: vec![METRICS_FILE.into()],
        checkpoint: CHECKPOINT_FILE.into(),
    };
    manifest.write(out)?;
    Ok((manifest, rows))
}
