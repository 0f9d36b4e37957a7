use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::grid::CellIndex;
use crate::mapping::Reachability;

use super::{CostGrid, PlannedPath, LETHAL};

const NO_PARENT: usize = usize::MAX;

/// Single-source shortest-path field over an 8-connected cost grid.
/// Diagonal moves may not cut a corner past a lethal cell.
#[derive(Debug, Clone)]
pub struct DijkstraField {
    costs: CostGrid,
    start: CellIndex,
    dist: Vec<f64>,
    parent: Vec<usize>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Runs Dijkstra from the cell containing `start`.
pub fn dijkstra_field(costs: &CostGrid, start: (f64, f64)) -> Result<DijkstraField> {
    let grid = costs.grid();
    let s = grid
        .world_to_cell(start.0, start.1)
        .ok_or_else(|| Error::invalid("start lies outside the grid"))?;
    if costs.is_lethal(s) {
        return Err(Error::invalid("start lies in a lethal cell"));
    }
    let res = grid.resolution();
    let n = grid.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![NO_PARENT; n];
    let si = grid.flat(s);
    dist[si] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, si));
    while let Some(Entry(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let c = grid.unflat(i);
        for (dc, dr) in crate::grid::NEIGHBORS_8 {
            let Some(m) = grid.offset(c, dc, dr) else { continue };
            let cost = costs.cost(m);
            if cost == LETHAL {
                continue;
            }
            let step = if dc != 0 && dr != 0 {
                let side_a = grid.offset(c, dc, 0).is_some_and(|x| !costs.is_lethal(x));
                let side_b = grid.offset(c, 0, dr).is_some_and(|x| !costs.is_lethal(x));
                if !(side_a && side_b) {
                    continue;
                }
                std::f64::consts::SQRT_2 * res
            } else {
                res
            };
            let nd = d + step * cost;
            let j = grid.flat(m);
            if nd < dist[j] {
                dist[j] = nd;
                parent[j] = i;
                heap.push(Entry(nd, j));
            }
        }
    }
    Ok(DijkstraField { costs: costs.clone(), start: s, dist, parent })
}

impl DijkstraField {
    pub fn start(&self) -> CellIndex {
        self.start
    }

    pub fn cost_grid(&self) -> &CostGrid {
        &self.costs
    }

    /// Minimum cost to the cell containing `(x, y)`, if reachable.
    pub fn cost_to(&self, x: f64, y: f64) -> Option<f64> {
        let c = self.costs.grid().world_to_cell(x, y)?;
        let d = self.dist[self.costs.grid().flat(c)];
        d.is_finite().then_some(d)
    }

    pub fn cell_cost_to(&self, c: CellIndex) -> f64 {
        self.dist[self.costs.grid().flat(c)]
    }

    /// Minimum-cost path to the cell containing `(x, y)`.
    pub fn path_to(&self, x: f64, y: f64) -> Option<PlannedPath> {
        let grid = self.costs.grid();
        let goal = grid.world_to_cell(x, y)?;
        let mut i = grid.flat(goal);
        let cost = self.dist[i];
        if !cost.is_finite() {
            return None;
        }
        let mut cells = vec![i];
        while self.parent[i] != NO_PARENT {
            i = self.parent[i];
            cells.push(i);
        }
        cells.reverse();
        let waypoints = cells.into_iter().map(|k| grid.cell_center(grid.unflat(k))).collect();
        Some(PlannedPath { waypoints, cost })
    }
}

impl Reachability for DijkstraField {
    fn reachable(&self, x: f64, y: f64) -> bool {
        self.cost_to(x, y).is_some()
    }
}

/// Minimum-cost path from `start` to `goal`, or `None` when the goal is
/// lethal, off the grid, or disconnected from the start.
pub fn plan_dijkstra(costs: &CostGrid, start: (f64, f64), goal: (f64, f64)) -> Result<Option<PlannedPath>> {
    Ok(dijkstra_field(costs, start)?.path_to(goal.0, goal.1))
}
