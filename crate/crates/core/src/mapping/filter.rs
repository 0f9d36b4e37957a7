use crate::grid::{Cell, OccupancyGrid};

use super::FrontierCandidate;

/// Answers whether a goal can be reached from the robot's current position.
pub trait Reachability {
    fn reachable(&self, x: f64, y: f64) -> bool;
}

impl<F: Fn(f64, f64) -> bool> Reachability for F {
    fn reachable(&self, x: f64, y: f64) -> bool {
        self(x, y)
    }
}

/// Drops stale, uninformative, unreachable and duplicate candidates.
///
/// A candidate is stale once `epoch - created_at > max_age`. It is
/// uninformative when no unknown cell lies within `info_radius_cells` of it.
/// Duplicates are candidates in the same or an adjacent cell as an earlier
/// survivor. Input order decides which duplicate survives.
pub fn filter_frontiers(
    candidates: &[FrontierCandidate],
    grid: &OccupancyGrid,
    reach: &impl Reachability,
    info_radius_cells: usize,
    max_age: usize,
    epoch: usize,
) -> Vec<FrontierCandidate> {
    let radius = info_radius_cells as f64 * grid.resolution();
    let mut kept: Vec<(FrontierCandidate, (i64, i64))> = Vec::new();
    for cand in candidates {
        if epoch.saturating_sub(cand.created_at) > max_age {
            continue;
        }
        let (x, y) = cand.position;
        let informative = grid.disc_cells(x, y, radius).into_iter().any(|(c, r)| {
            grid.contains_signed(c, r)
                && grid.get(crate::grid::CellIndex::new(c as usize, r as usize)) == Cell::Unknown
        });
        if !informative || !reach.reachable(x, y) {
            continue;
        }
        let cell = grid.world_to_cell_signed(x, y);
        if kept
            .iter()
            .any(|(_, k)| (k.0 - cell.0).abs() <= 1 && (k.1 - cell.1).abs() <= 1)
        {
            continue;
        }
        kept.push((*cand, cell));
    }
    kept.into_iter().map(|(c, _)| c).collect()
}
