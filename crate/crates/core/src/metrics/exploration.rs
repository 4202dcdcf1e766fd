use std::collections::HashSet;
use std::hash::Hash;

use super::render::SnapshotBitmap;

/// New-color counts: element `k` is the number of colors in snapshot `k`
/// that never appeared in any earlier snapshot.
pub fn exploration_series(snapshots: &[SnapshotBitmap]) -> Vec<u64> {
    new_item_counts(snapshots.iter().map(SnapshotBitmap::type_colors))
}

/// Same count over arbitrary per-snapshot sets.
pub fn new_item_counts<T, I, S>(sets: I) -> Vec<u64>
where
    T: Eq + Hash,
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = T>,
{
    let mut seen: HashSet<T> = HashSet::new();
    sets.into_iter()
        .map(|s| {
            let mut fresh = 0;
            for c in s {
                if seen.insert(c) {
                    fresh += 1;
                }
            }
            fresh
        })
        .collect()
}
