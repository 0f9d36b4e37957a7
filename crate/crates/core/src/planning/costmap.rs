use crate::error::{Error, Result};
use crate::grid::{Cell, CellIndex, OccupancyGrid};

/// Cost of a cell that may not be entered.
pub const LETHAL: f64 = f64::INFINITY;

/// Per-cell traversal cost per meter, aligned with an [`OccupancyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CostGrid {
    grid: OccupancyGrid,
    costs: Vec<f64>,
}

impl CostGrid {
    /// The occupancy grid the costs were derived from.
    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn cost(&self, c: CellIndex) -> f64 {
        self.costs[self.grid.flat(c)]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn is_lethal(&self, c: CellIndex) -> bool {
        self.cost(c) == LETHAL
    }

    /// Nearest non-lethal cell to `(x, y)` by center distance, ties broken
    /// by row-major index.
    pub fn nearest_free(&self, x: f64, y: f64) -> Option<CellIndex> {
        let mut best: Option<(f64, usize)> = None;
        for (i, &c) in self.costs.iter().enumerate() {
            if c == LETHAL {
                continue;
            }
            let (cx, cy) = self.grid.cell_center(self.grid.unflat(i));
            let d = (cx - x).hypot(cy - y);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        best.map(|(_, i)| self.grid.unflat(i))
    }
}

/// Builds a cost grid: occupied and unknown cells are lethal, free cells
/// cost 1 per meter, and free cells within `inflation_radius` of an
/// occupied cell cost `peak` at distance zero, decaying linearly to 1 at
/// the radius.
pub fn inflate_costmap(grid: &OccupancyGrid, inflation_radius: f64, peak: f64) -> Result<CostGrid> {
    if !(inflation_radius >= 0.0 && inflation_radius.is_finite()) {
        return Err(Error::invalid("inflation radius must be non-negative"));
    }
    if !(peak >= 1.0 && peak.is_finite()) {
        return Err(Error::invalid("peak inflation cost must be at least 1"));
    }
    let mut costs: Vec<f64> = grid
        .cells()
        .iter()
        .map(|&c| if c == Cell::Free { 1.0 } else { LETHAL })
        .collect();
    if inflation_radius > 0.0 {
        let res = grid.resolution();
        let reach = (inflation_radius / res).ceil() as i64;
        for i in 0..grid.len() {
            let c = grid.unflat(i);
            if grid.get(c) != Cell::Occupied {
                continue;
            }
            for dr in -reach..=reach {
                for dc in -reach..=reach {
                    let Some(n) = grid.offset(c, dc, dr) else { continue };
                    let j = grid.flat(n);
                    if costs[j] == LETHAL {
                        continue;
                    }
                    let d = (dc as f64).hypot(dr as f64) * res;
                    if d <= inflation_radius {
                        let v = peak - (peak - 1.0) * d / inflation_radius;
                        costs[j] = costs[j].max(v);
                    }
                }
            }
        }
    }
    Ok(CostGrid { grid: grid.clone(), costs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_grid(n: usize) -> OccupancyGrid {
        let mut g = OccupancyGrid::new(0.1, 0.0, 0.0, n, n).unwrap();
        for i in 0..g.len() {
            let c = g.unflat(i);
            g.set(c, Cell::Free);
        }
        g
    }

    #[test]
    fn zero_radius_marks_only_blocked_cells() {
        let mut g = free_grid(10);
        g.set(CellIndex::new(4, 4), Cell::Occupied);
        g.set(CellIndex::new(0, 0), Cell::Unknown);
        let cg = inflate_costmap(&g, 0.0, 5.0).unwrap();
        let lethal = cg.costs().iter().filter(|&&c| c == LETHAL).count();
        assert_eq!(lethal, 2);
        assert!(cg.costs().iter().all(|&c| c == LETHAL || c == 1.0));
    }

    #[test]
    fn uniform_when_free() {
        let cg = inflate_costmap(&free_grid(8), 0.5, 5.0).unwrap();
        assert!(cg.costs().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn single_obstacle_matches_brute_force() {
        let mut g = free_grid(15);
        let o = CellIndex::new(7, 7);
        g.set(o, Cell::Occupied);
        let radius = 0.3;
        let cg = inflate_costmap(&g, radius, 5.0).unwrap();
        for i in 0..g.len() {
            let c = g.unflat(i);
            let (x, y) = g.cell_center(c);
            let (ox, oy) = g.cell_center(o);
            let d = (x - ox).hypot(y - oy);
            let expected = if c == o {
                LETHAL
            } else if d <= radius + 1e-12 {
                5.0 - 4.0 * d / radius
            } else {
                1.0
            };
            let got = cg.cost(c);
            assert!(got == expected || (got - expected).abs() < 1e-9, "{c:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn nearest_free_cell() {
        let mut g = free_grid(5);
        g.set(CellIndex::new(2, 2), Cell::Occupied);
        let cg = inflate_costmap(&g, 0.0, 1.0).unwrap();
        let n = cg.nearest_free(0.25, 0.25).unwrap();
        assert_ne!(n, CellIndex::new(2, 2));
        assert!(inflate_costmap(&g, -1.0, 5.0).is_err());
    }
}
