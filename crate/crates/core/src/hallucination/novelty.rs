use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::grid::{Cell, CellIndex, OccupancyGrid};
use crate::info::InfoMatrix;

/// Fraction of cells within `radius` of the pose that are unknown. Cells
/// outside the grid count as unknown.
pub fn novelty_sigma(pose: &Pose2, grid: &OccupancyGrid, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("novelty radius must be positive"));
    }
    let mut cells = grid.disc_cells(pose.x, pose.y, radius);
    if cells.is_empty() {
        cells.push(grid.world_to_cell_signed(pose.x, pose.y));
    }
    let unknown = cells
        .iter()
        .filter(|&&(c, r)| {
            !grid.contains_signed(c, r) || grid.get(CellIndex::new(c as usize, r as usize)) == Cell::Unknown
        })
        .count();
    Ok(unknown as f64 / cells.len() as f64)
}

/// Scales edge information by `1 + σ`, so unexplored regions are rewarded
/// and `σ = 0` leaves `H` untouched.
pub fn apply_novelty(h: &InfoMatrix, sigma: f64) -> InfoMatrix {
    h.scaled(1.0 + sigma)
}
