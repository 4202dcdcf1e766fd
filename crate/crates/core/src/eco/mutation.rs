//! Recipe mutation and differentiation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::params::{KineticParams, PARAM_COUNT, PARAM_RANGES};
use crate::recipe::{random_params, Recipe, RecipeEntry};

pub const DUPLICATION_RATE: f64 = 0.05;
pub const DELETION_RATE: f64 = 0.05;
pub const POINT_MUTATION_RATE: f64 = 0.10;
/// Gaussian step of a point mutation, as a fraction of the parameter's range.
pub const POINT_MUTATION_SIGMA: f64 = 0.10;

/// What a single mutation event did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MutationEvent {
    /// Original entry indices that were duplicated.
    pub duplications: Vec<usize>,
    /// Original entry indices that were deleted.
    pub deletions: Vec<usize>,
    /// Set when a deletion was cancelled to keep the recipe non-empty.
    pub suppressed_deletion: bool,
    pub additions: usize,
    /// (entry index in the result, parameter index) pairs.
    pub point_mutations: Vec<(usize, usize)>,
}

/// Perturbs each parameter with probability `rate` by N(0, σ·range), then clamps.
/// Returns the indices of perturbed parameters.
pub fn point_mutate<R: Rng + ?Sized>(
    params: &KineticParams,
    rng: &mut R,
    rate: f64,
    sigma_fraction: f64,
) -> (KineticParams, Vec<usize>) {
    let mut v = params.to_array();
    let mut hit = Vec::new();
    for (k, x) in v.iter_mut().enumerate() {
        if rng.random_bool(rate) {
            let (lo, hi) = PARAM_RANGES[k];
            let z: f64 = rng.sample(StandardNormal);
            *x += z * sigma_fraction * (hi - lo);
            hit.push(k);
        }
    }
    (KineticParams::clamped(v), hit)
}

/// One mutation event, applied in order: per-entry duplication, per-entry
/// deletion (of original entries, never emptying the recipe), addition of one
/// random entry with probability `add_rate`, then per-parameter point mutation.
pub fn mutate_recipe_traced<R: Rng + ?Sized>(
    recipe: &Recipe,
    rng: &mut R,
    add_rate: f64,
) -> (Recipe, MutationEvent) {
    let original = recipe.entries();
    let mut ev = MutationEvent::default();

    let dup: Vec<bool> = original.iter().map(|_| rng.random_bool(DUPLICATION_RATE)).collect();
    let del: Vec<bool> = original.iter().map(|_| rng.random_bool(DELETION_RATE)).collect();

    let mut entries: Vec<RecipeEntry> = Vec::with_capacity(original.len() + 2);
    for (i, e) in original.iter().enumerate() {
        if del[i] {
            ev.deletions.push(i);
        } else {
            entries.push(*e);
        }
        if dup[i] {
            ev.duplications.push(i);
            entries.push(*e);
        }
    }
    if entries.is_empty() {
        // every entry was deleted and none duplicated: keep the first one
        let first = ev.deletions.remove(0);
        entries.push(original[first]);
        ev.suppressed_deletion = true;
    }

    if rng.random_bool(add_rate) {
        let mean = entries.iter().map(|e| e.count as f64).sum::<f64>() / entries.len() as f64;
        entries.push(RecipeEntry {
            count: (mean.round() as u32).max(1),
            params: random_params(rng),
        });
        ev.additions = 1;
    }

    for (idx, e) in entries.iter_mut().enumerate() {
        let (p, hit) = point_mutate(&e.params, rng, POINT_MUTATION_RATE, POINT_MUTATION_SIGMA);
        e.params = p;
        ev.point_mutations.extend(hit.into_iter().map(|k| (idx, k)));
    }
    debug_assert!(ev.point_mutations.iter().all(|&(_, k)| k < PARAM_COUNT));

    (Recipe::new(entries).expect("non-empty with positive counts"), ev)
}

pub fn mutate_recipe<R: Rng + ?Sized>(recipe: &Recipe, rng: &mut R, add_rate: f64) -> Recipe {
    mutate_recipe_traced(recipe, rng, add_rate).0
}

/// Picks entry `k` with probability `count_k / Σ counts`.
pub fn differentiate<R: Rng + ?Sized>(recipe: &Recipe, rng: &mut R) -> usize {
    if recipe.len() == 1 {
        return 0;
    }
    let total = recipe.total_count();
    let mut u = rng.random_range(0..total);
    for (k, e) in recipe.entries().iter().enumerate() {
        let c = e.count as u64;
        if u < c {
            return k;
        }
        u -= c;
    }
    unreachable!("draw below total count")
}
