use std::collections::VecDeque;

use crate::grid::{Cell, CellIndex, OccupancyGrid, NEIGHBORS_8};
use crate::world::World;

/// Cells of `grid`'s geometry reachable from `from` in the true world:
/// 4-connected flood fill where a step between cell centers may not cross
/// an obstacle and centers may not lie inside a solid box.
pub fn true_reachable_cells(world: &World, grid: &OccupancyGrid, from: (f64, f64)) -> Vec<bool> {
    let mut seen = vec![false; grid.len()];
    let Some(start) = grid.world_to_cell(from.0, from.1) else {
        return seen;
    };
    let inside = |c: CellIndex| {
        let (x, y) = grid.cell_center(c);
        world.bounds().contains(x, y) && !world.inside_obstacle(x, y)
    };
    if !inside(start) {
        return seen;
    }
    seen[grid.flat(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let a = grid.cell_center(c);
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let Some(n) = grid.offset(c, dc, dr) else { continue };
            let j = grid.flat(n);
            if seen[j] || !inside(n) || world.occluded(a, grid.cell_center(n)) {
                continue;
            }
            seen[j] = true;
            queue.push_back(n);
        }
    }
    seen
}

/// Fraction of truly reachable cells that the map no longer marks unknown.
pub fn coverage(grid: &OccupancyGrid, reachable: &[bool]) -> f64 {
    let total = reachable.iter().filter(|&&r| r).count();
    if total == 0 {
        return 1.0;
    }
    let known = grid
        .cells()
        .iter()
        .zip(reachable)
        .filter(|&(&c, &r)| r && c != Cell::Unknown)
        .count();
    known as f64 / total as f64
}

/// Whether a free cell bordering unknown space can be reached from `from`
/// through free cells (8-connected, no corner cutting past blocked cells).
pub fn reachable_frontier_exists(grid: &OccupancyGrid, from: CellIndex) -> bool {
    if grid.get(from) != Cell::Free {
        return false;
    }
    let free = |c: CellIndex| grid.get(c) == Cell::Free;
    let mut seen = vec![false; grid.len()];
    seen[grid.flat(from)] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        if grid.borders_unknown(c) {
            return true;
        }
        for (dc, dr) in NEIGHBORS_8 {
            let Some(n) = grid.offset(c, dc, dr) else { continue };
            if seen[grid.flat(n)] || !free(n) {
                continue;
            }
            if dc != 0 && dr != 0 {
                let ok = grid.offset(c, dc, 0).is_some_and(free) && grid.offset(c, 0, dr).is_some_and(free);
                if !ok {
                    continue;
                }
            }
            seen[grid.flat(n)] = true;
            queue.push_back(n);
        }
    }
    false
}
