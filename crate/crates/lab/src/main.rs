use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use swarmchem::eco::Condition;
use swarmchem::metrics::{decode_ppm, metric_rows, metrics_csv};
use swarmchem_lab::run::DEFAULT_SNAPSHOT_INTERVAL;
use swarmchem_lab::server::{Server, ServerOptions};
use swarmchem_lab::{run, sweep, InitSpec, RunConfig, RunOptions, SweepOptions};

#[derive(Parser)]
#[command(name = "swarmchem", version, about = "Swarm chemistry experiments and interactive sessions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one ecological simulation and write snapshots, metrics and a manifest.
    Run {
        /// TOML run configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Condition preset, overriding the config file's.
        #[arg(long)]
        preset: Option<Condition>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30_000)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_SNAPSHOT_INTERVAL)]
        snap_every: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every condition × seed × init combination and summarize.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        conditions: Vec<Condition>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        /// random, a bundled design name, or file:<path>
        #[arg(long, value_delimiter = ',', default_value = "random")]
        inits: Vec<String>,
        /// Base config for world size and resolution; presets come from --conditions.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 30_000)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_SNAPSHOT_INTERVAL)]
        snap_every: u64,
        /// Summary window start (inclusive).
        #[arg(long, requires = "window_end")]
        window_start: Option<u64>,
        /// Summary window end (inclusive).
        #[arg(long, requires = "window_start")]
        window_end: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the metric series of a directory of snap_<step>.ppm files.
    Metrics {
        #[arg(long)]
        snapshots: PathBuf,
        /// Write CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve interactive sessions over TCP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        /// Save each finished session's operator log here.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Cmd::Run {
            config,
            preset,
            seed,
            steps,
            snap_every,
            out,
        } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            if let Some(c) = preset {
                cfg.preset = Some(c);
                cfg.eco = c.config();
            }
            let opts = RunOptions {
                seed,
                steps,
                snap_every,
                run_id: None,
            };
            let manifest = run(&cfg, &opts, &out)?;
            println!("{}", serde_json::to_string_pretty(&manifest)?);
        }
        Cmd::Sweep {
            conditions,
            seeds,
            inits,
            config,
            steps,
            snap_every,
            window_start,
            window_end,
            out,
        } => {
            let inits = inits
                .iter()
                .map(|s| s.parse::<InitSpec>())
                .collect::<Result<Vec<_>, _>>()?;
            let mut opts = SweepOptions::new(conditions, seeds, inits, steps);
            opts.snap_every = snap_every;
            if let Some(p) = &config {
                opts.base = RunConfig::load(p)?;
            }
            opts.window = window_start.zip(window_end);
            let manifest = sweep(&opts, &out)?;
            for r in manifest.runs.iter().filter(|r| r.error.is_some()) {
                eprintln!("run {} failed: {}", r.run_id, r.error.as_deref().unwrap_or_default());
            }
            println!("{} of {} runs completed", manifest.completed(), manifest.runs.len());
        }
        Cmd::Metrics { snapshots, out } => {
            let csv = snapshot_metrics(&snapshots)?;
            match out {
                Some(p) => std::fs::write(&p, csv).with_context(|| p.display().to_string())?,
                None => print!("{csv}"),
            }
        }
        Cmd::Serve { bind, log_dir } => {
            let server = Server::bind(&bind, ServerOptions { log_dir }).with_context(|| format!("bind {bind}"))?;
            eprintln!("listening on {}", server.local_addr()?);
            server.serve()?;
        }
    }
    Ok(())
}

fn snapshot_metrics(dir: &PathBuf) -> Result<String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| dir.display().to_string())? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(step) = name.strip_prefix("snap_").and_then(|s| s.strip_suffix(".ppm")) {
            if let Ok(step) = step.parse::<u64>() {
                files.push((step, path));
            }
        }
    }
    if files.is_empty() {
        bail!("no snap_<step>.ppm files in {}", dir.display());
    }
    files.sort();
    let bitmaps = files
        .iter()
        .map(|(step, path)| {
            let bytes = std::fs::read(path).with_context(|| path.display().to_string())?;
            decode_ppm(&bytes, *step).with_context(|| path.display().to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(metrics_csv(&metric_rows(&bitmaps)))
}
