use crate::kinetics::{SpatialGrid, World};

/// Same-type clusters: active particles of identical kinetic parameters
/// linked when closer than `link` (single linkage). Returns the cluster sizes.
pub fn same_type_clusters(world: &World, link: f64) -> Vec<usize> {
    let ps = world.particles();
    let active: Vec<usize> = (0..ps.len()).filter(|&i| ps[i].is_active()).collect();
    let mut parent: Vec<usize> = (0..ps.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let grid = SpatialGrid::build(world.side(), link, active.iter().map(|&i| (i, ps[i].pos)));
    let l2 = link * link;
    for &i in &active {
        let pi = ps[i].params();
        grid.for_each_candidate(ps[i].pos, link, |j, pos| {
            if j > i && (pos - ps[i].pos).norm_sq() < l2 && ps[j].params() == pi {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        });
    }
    let mut sizes = std::collections::BTreeMap::new();
    for &i in &active {
        *sizes.entry(find(&mut parent, i)).or_insert(0usize) += 1;
    }
    sizes.into_values().collect()
}

/// Mean same-type cluster size (0 when there are no active particles).
pub fn mean_cluster_size(world: &World, link: f64) -> f64 {
    let sizes = same_type_clusters(world, link);
    if sizes.is_empty() {
        0.0
    } else {
        sizes.iter().sum::<usize>() as f64 / sizes.len() as f64
    }
}
