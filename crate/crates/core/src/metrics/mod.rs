//! Snapshot-based run metrics.

mod clusters;
mod exploration;
mod ppm;
mod render;
mod structuredness;
mod summary;

use thiserror::Error;

pub use clusters::{mean_cluster_size, same_type_clusters};
pub use exploration::{exploration_series, new_item_counts};
pub use ppm::{decode_ppm, encode_ppm, snapshot_file_name, write_ppm};
pub use render::{
    is_type_color, render, render_at, type_color, Rgb, SnapshotBitmap, BACKGROUND, DEFAULT_RESOLUTION,
    PASSIVE_GRAY,
};
pub use structuredness::{
    kl_divergence, reference_histogram, sample_distance_histogram, structuredness, structuredness_with,
    uniform_reference, DistanceHistogram, DISTANCE_BINS, PAIR_SAMPLES, REFERENCE_FLOOR, REFERENCE_PAIRS,
};
pub use summary::{
    condition_means, condition_summary, metrics_csv, summarize_run, summary_csv, MetricRow, RunSeries,
    SummaryRow, SUMMARY_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("structuredness needs at least 2 particle pixels, found {0}")]
    TooFewParticles(usize),
    #[error("run {run_id}: no snapshots in window [{start}, {end}]")]
    EmptyWindow { run_id: String, start: u64, end: u64 },
    #[error("image: {0}")]
    Image(String),
}

/// Metrics of an ordered snapshot sequence: new colors and structuredness per snapshot.
pub fn metric_rows(snapshots: &[SnapshotBitmap]) -> Vec<MetricRow> {
    use rayon::prelude::*;
    let explo = exploration_series(snapshots);
    let kl: Vec<Option<f64>> = snapshots.par_iter().map(|b| structuredness(b).ok()).collect();
    snapshots
        .iter()
        .zip(explo)
        .zip(kl)
        .map(|((b, e), k)| MetricRow {
            step: b.step,
            new_colors: e,
            kl_divergence: k,
        })
        .collect()
}
