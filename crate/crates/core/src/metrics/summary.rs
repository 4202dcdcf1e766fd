//! Per-run metric series and windowed condition summaries.

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// One snapshot's metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub step: u64,
    pub new_colors: u64,
    /// `None` when the snapshot had fewer than two particle pixels.
    pub kl_divergence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSeries {
    pub condition: String,
    pub run_id: String,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub condition: String,
    pub run_id: String,
    pub mean_exploration: f64,
    pub mean_structuredness: f64,
}

/// Default averaging window (inclusive).
pub const SUMMARY_WINDOW: (u64, u64) = (10_000, 30_000);

/// Mean exploration and mean structuredness over snapshots with step in
/// `window` (inclusive). Snapshots without a structuredness value count as 0.
pub fn summarize_run(run: &RunSeries, window: (u64, u64)) -> Result<SummaryRow, MetricsError> {
    let rows: Vec<&MetricRow> = run
        .rows
        .iter()
        .filter(|r| r.step >= window.0 && r.step <= window.1)
        .collect();
    if rows.is_empty() {
        return Err(MetricsError::EmptyWindow {
            run_id: run.run_id.clone(),
            start: window.0,
            end: window.1,
        });
    }
    let n = rows.len() as f64;
    Ok(SummaryRow {
        condition: run.condition.clone(),
        run_id: run.run_id.clone(),
        mean_exploration: rows.iter().map(|r| r.new_colors as f64).sum::<f64>() / n,
        mean_structuredness: rows.iter().map(|r| r.kl_divergence.unwrap_or(0.0)).sum::<f64>() / n,
    })
}

/// One summary row per run, grouped by condition (stable order of first appearance).
pub fn condition_summary(runs: &[RunSeries], window: (u64, u64)) -> Result<Vec<SummaryRow>, MetricsError> {
    let mut conditions: Vec<&str> = Vec::new();
    for r in runs {
        if !conditions.contains(&r.condition.as_str()) {
            conditions.push(&r.condition);
        }
    }
    let mut out = Vec::with_capacity(runs.len());
    for c in conditions {
        for r in runs.iter().filter(|r| r.condition == c) {
            out.push(summarize_run(r, window)?);
        }
    }
    Ok(out)
}

/// Mean of the per-run means for each condition.
pub fn condition_means(rows: &[SummaryRow]) -> Vec<(String, f64, f64)> {
    let mut out: Vec<(String, f64, f64, usize)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|e| e.0 == r.condition) {
            Some(e) => {
                e.1 += r.mean_exploration;
                e.2 += r.mean_structuredness;
                e.3 += 1;
            }
            None => out.push((r.condition.clone(), r.mean_exploration, r.mean_structuredness, 1)),
        }
    }
    out.into_iter()
        .map(|(c, e, s, n)| (c, e / n as f64, s / n as f64))
        .collect()
}

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut s = String::from("step,new_colors,kl_divergence\n");
    for r in rows {
        let kl = r.kl_divergence.map(|v| v.to_string()).unwrap_or_default();
        s.push_str(&format!("{},{},{}\n", r.step, r.new_colors, kl));
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("condition,run_id,mean_exploration,mean_structuredness\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.condition, r.run_id, r.mean_exploration, r.mean_structuredness
        ));
    }
    s
}
