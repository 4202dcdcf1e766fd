//! Macroscopic structuredness: KL divergence of the sampled pairwise
//! distance distribution of particle pixels from that of uniformly spread
//! pixels in the same raster.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::render::SnapshotBitmap;
use super::MetricsError;
use crate::rng::keyed_stream;

pub const DISTANCE_BINS: usize = 100;
pub const PAIR_SAMPLES: usize = 100_000;
pub const REFERENCE_PAIRS: usize = 10_000_000;
/// Floor applied to empty reference bins.
pub const REFERENCE_FLOOR: f64 = 1e-12;

const REFERENCE_SEED: u64 = 0x5EF_E2E7_C3;

/// Normalized histogram over `DISTANCE_BINS` uniform bins on `[0, diagonal]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceHistogram {
    pub max_distance: f64,
    pub probabilities: Vec<f64>,
}

impl DistanceHistogram {
    pub fn bin_width(&self) -> f64 {
        self.max_distance / self.probabilities.len() as f64
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..=self.probabilities.len()).map(|k| k as f64 * w).collect()
    }

    fn from_counts(counts: &[u64], max_distance: f64) -> Self {
        let total: u64 = counts.iter().sum();
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self {
            max_distance,
            probabilities,
        }
    }
}

fn bin_of(d: f64, max: f64) -> usize {
    ((d / max * DISTANCE_BINS as f64) as usize).min(DISTANCE_BINS - 1)
}

fn diagonal(width: u32, height: u32) -> f64 {
    (width as f64).hypot(height as f64)
}

fn dist(a: (u32, u32), b: (u32, u32)) -> f64 {
    let dx = a.0 as f64 - b.0 as f64;
    let dy = a.1 as f64 - b.1 as f64;
    dx.hypot(dy)
}

/// Histogram of `samples` pair distances, pairs drawn with replacement
/// (the two members of a pair are distinct points).
pub fn sample_distance_histogram<R: Rng + ?Sized>(
    coords: &[(u32, u32)],
    width: u32,
    height: u32,
    samples: usize,
    rng: &mut R,
) -> Result<DistanceHistogram, MetricsError> {
    let n = coords.len();
    if n < 2 {
        return Err(MetricsError::TooFewParticles(n));
    }
    let max = diagonal(width, height);
    let mut counts = vec![0u64; DISTANCE_BINS];
    for _ in 0..samples {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        counts[bin_of(dist(coords[i], coords[j]), max)] += 1;
    }
    Ok(DistanceHistogram::from_counts(&counts, max))
}

/// Distance histogram of independent uniform pixel pairs, estimated with
/// `pairs` samples split over parallel keyed streams.
pub fn uniform_reference(width: u32, height: u32, pairs: usize, seed: u64) -> DistanceHistogram {
    const CHUNK: usize = 1 << 18;
    let max = diagonal(width, height);
    let chunks = pairs.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng: ChaCha8Rng = keyed_stream(seed, width as u64 * 1_000_003 + height as u64, c as u64);
            let n = CHUNK.min(pairs - c * CHUNK);
            let mut counts = vec![0u64; DISTANCE_BINS];
            for _ in 0..n {
                let a = (rng.random_range(0..width), rng.random_range(0..height));
                let b = (rng.random_range(0..width), rng.random_range(0..height));
                counts[bin_of(dist(a, b), max)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; DISTANCE_BINS],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    DistanceHistogram::from_counts(&counts, max)
}

/// Cached reference for a raster geometry (computed once per process).
pub fn reference_histogram(width: u32, height: u32) -> Arc<DistanceHistogram> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<DistanceHistogram>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(h) = cache.lock().unwrap().get(&(width, height)) {
        return h.clone();
    }
    let h = Arc::new(uniform_reference(width, height, REFERENCE_PAIRS, REFERENCE_SEED));
    cache.lock().unwrap().entry((width, height)).or_insert(h).clone()
}

/// `Σ p_i ln(p_i / q_i)` over bins with `p_i > 0`; `q_i` floored at [`REFERENCE_FLOOR`].
pub fn kl_divergence(p: &DistanceHistogram, q: &DistanceHistogram) -> f64 {
    p.probabilities
        .iter()
        .zip(&q.probabilities)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi.max(REFERENCE_FLOOR)).ln())
        .sum()
}

/// Structuredness of a snapshot with an explicit sampling stream.
pub fn structuredness_with<R: Rng + ?Sized>(bmp: &SnapshotBitmap, rng: &mut R) -> Result<f64, MetricsError> {
    let coords = bmp.particle_pixels();
    let p = sample_distance_histogram(&coords, bmp.width, bmp.height, PAIR_SAMPLES, rng)?;
    let q = reference_histogram(bmp.width, bmp.height);
    // clamp the tiny negative values floating-point summation can produce
    Ok(kl_divergence(&p, &q).max(0.0))
}

/// Structuredness with a sampling stream keyed by the snapshot step, so the
/// value is a pure function of the bitmap.
pub fn structuredness(bmp: &SnapshotBitmap) -> Result<f64, MetricsError> {
    let mut rng = keyed_stream(0xD157_A7CE, bmp.step, (bmp.width as u64) << 32 | bmp.height as u64);
    structuredness_with(bmp, &mut rng)
}
