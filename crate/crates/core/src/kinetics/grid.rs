//! Uniform-grid spatial hash over a bounded square.
//!
//! Cells are stored CSR-style (`starts` + flat `items`) and rebuilt from
//! scratch each step. No wrap-around adjacency: a cell on the left edge is
//! not a neighbor of one on the right edge.

use super::vec2::Vec2;

#[derive(Debug, Clone)]
pub struct SpatialGrid {
    cell: f64,
    cols: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    positions: Vec<Vec2>,
}

impl SpatialGrid {
    /// Indexes `points` (id, position) in a `side`×`side` square with the given cell size.
    pub fn build<I>(side: f64, cell: f64, points: I) -> Self
    where
        I: IntoIterator<Item = (usize, Vec2)>,
    {
        assert!(cell > 0.0 && side > 0.0);
        let cols = ((side / cell).ceil() as usize).max(1);
        let n_cells = cols * cols;
        let pts: Vec<(usize, Vec2)> = points.into_iter().collect();

        let mut counts = vec![0u32; n_cells + 1];
        let cell_of: Vec<usize> = pts
            .iter()
            .map(|&(_, p)| Self::cell_index(cell, cols, p))
            .collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for k in 1..=n_cells {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let max_id = pts.iter().map(|&(id, _)| id + 1).max().unwrap_or(0);
        let mut positions = vec![Vec2::ZERO; max_id];
        let mut items = vec![0u32; pts.len()];
        for (&(id, p), &c) in pts.iter().zip(&cell_of) {
            items[fill[c] as usize] = id as u32;
            fill[c] += 1;
            positions[id] = p;
        }
        Self {
            cell,
            cols,
            starts,
            items,
            positions,
        }
    }

    fn cell_index(cell: f64, cols: usize, p: Vec2) -> usize {
        let cx = ((p.x / cell) as usize).min(cols - 1);
        let cy = ((p.y / cell) as usize).min(cols - 1);
        cy * cols + cx
    }

    fn coord(&self, v: f64) -> isize {
        ((v / self.cell).floor() as isize).clamp(-1, self.cols as isize)
    }

    /// Visits every indexed point whose cell overlaps the query square
    /// around `center`; the caller does the exact distance test.
    #[inline]
    pub fn for_each_candidate(&self, center: Vec2, radius: f64, mut f: impl FnMut(usize, Vec2)) {
        let x0 = self.coord(center.x - radius).max(0) as usize;
        let y0 = self.coord(center.y - radius).max(0) as usize;
        let x1 = self.coord(center.x + radius).min(self.cols as isize - 1);
        let y1 = self.coord(center.y + radius).min(self.cols as isize - 1);
        if x1 < 0 || y1 < 0 {
            return;
        }
        let (x1, y1) = (x1 as usize, y1 as usize);
        for cy in y0..=y1 {
            let row = cy * self.cols;
            for cx in x0..=x1 {
                let c = row + cx;
                let (s, e) = (self.starts[c] as usize, self.starts[c + 1] as usize);
                for &id in &self.items[s..e] {
                    let id = id as usize;
                    f(id, self.positions[id]);
                }
            }
        }
    }

    /// Ids strictly closer than `radius` to `center` (excluding `exclude`), sorted.
    pub fn within(&self, center: Vec2, radius: f64, exclude: Option<usize>) -> Vec<usize> {
        let r2 = radius * radius;
        let mut out = Vec::new();
        self.for_each_candidate(center, radius, |j, p| {
            if Some(j) != exclude && (p - center).norm_sq() < r2 {
                out.push(j);
            }
        });
        out.sort_unstable();
        out
    }
}
