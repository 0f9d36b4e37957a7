use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Cell, CellIndex, OccupancyGrid};

/// A random tree grown through known free space. The tree persists across
/// calls to [`grow`](Self::grow) so it keeps extending as the map expands.
#[derive(Debug, Clone)]
pub struct RrtFrontierDetector {
    nodes: Vec<(f64, f64)>,
    step: f64,
    rng: ChaCha8Rng,
}

enum Extension {
    Free,
    Blocked,
    Frontier(CellIndex),
}

impl RrtFrontierDetector {
    pub fn new(grid: &OccupancyGrid, root: (f64, f64), step: f64, seed: u64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid("tree step must be positive"));
        }
        match grid.world_to_cell(root.0, root.1) {
            Some(c) if grid.get(c) == Cell::Free => {}
            _ => return Err(Error::invalid("tree root must lie in a free cell")),
        }
        Ok(Self {
            nodes: vec![root],
            step,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Runs `iterations` extension attempts. An extension that crosses into
    /// unknown space reports the center of the last free cell it passed.
    pub fn grow(&mut self, grid: &OccupancyGrid, iterations: usize) -> Vec<(f64, f64)> {
        let (ox, oy) = grid.origin();
        let w = grid.width() as f64 * grid.resolution();
        let h = grid.height() as f64 * grid.resolution();
        let mut found = Vec::new();
        for _ in 0..iterations {
            let sample = (ox + self.rng.random::<f64>() * w, oy + self.rng.random::<f64>() * h);
            let nearest = self.nearest(sample);
            let (dx, dy) = (sample.0 - nearest.0, sample.1 - nearest.1);
            let d = dx.hypot(dy);
            if d < 1e-12 {
                continue;
            }
            let len = d.min(self.step);
            let dir = (dx / d, dy / d);
            match classify(grid, nearest, dir, len) {
                Extension::Free => self.nodes.push((nearest.0 + dir.0 * len, nearest.1 + dir.1 * len)),
                Extension::Frontier(c) => found.push(grid.cell_center(c)),
                Extension::Blocked => {}
            }
        }
        found
    }

    fn nearest(&self, p: (f64, f64)) -> (f64, f64) {
        let mut best = self.nodes[0];
        let mut best_d = f64::INFINITY;
        for &n in &self.nodes {
            let d = (n.0 - p.0).powi(2) + (n.1 - p.1).powi(2);
            if d < best_d {
                best_d = d;
                best = n;
            }
        }
        best
    }
}

fn classify(grid: &OccupancyGrid, from: (f64, f64), dir: (f64, f64), len: f64) -> Extension {
    let mut last_free = None;
    let mut outcome = None;
    let mut visited = 0usize;
    grid.walk_ray(from, dir, len, |c| {
        visited += 1;
        match grid.get(c) {
            Cell::Free => {
                last_free = Some(c);
                true
            }
            Cell::Occupied => {
                outcome = Some(Extension::Blocked);
                false
            }
            Cell::Unknown => {
                outcome = Some(match last_free {
                    Some(f) => Extension::Frontier(f),
                    None => Extension::Blocked,
                });
                false
            }
        }
    });
    if let Some(o) = outcome {
        return o;
    }
    let end = (from.0 + dir.0 * len, from.1 + dir.1 * len);
    if visited == 0 || grid.world_to_cell(end.0, end.1).is_none() {
        Extension::Blocked
    } else {
        Extension::Free
    }
}

/// One-shot detector: a fresh tree rooted at `root`.
pub fn detect_frontiers_rrt(
    grid: &OccupancyGrid,
    root: (f64, f64),
    step: f64,
    iterations: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut det = RrtFrontierDetector::new(grid, root, step, seed)?;
    Ok(det.grow(grid, iterations))
}
