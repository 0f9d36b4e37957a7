use crate::grid::{Cell, CellIndex, OccupancyGrid};

/// Free-space mask after a 3×3 opening (erosion then dilation).
/// Out-of-grid neighbors are ignored rather than treated as blocked.
pub fn morphological_open(grid: &OccupancyGrid) -> Vec<bool> {
    let n = grid.len();
    let free: Vec<bool> = grid.cells().iter().map(|&c| c == Cell::Free).collect();
    let mut eroded = vec![false; n];
    for (i, e) in eroded.iter_mut().enumerate() {
        if free[i] {
            let c = grid.unflat(i);
            *e = grid.neighbors8(c).all(|m| free[grid.flat(m)]);
        }
    }
    let mut opened = vec![false; n];
    for (i, o) in opened.iter_mut().enumerate() {
        let c = grid.unflat(i);
        *o = eroded[i] || grid.neighbors8(c).any(|m| eroded[grid.flat(m)]);
    }
    opened
}

/// Frontier cells that survive the opening, in row-major order.
pub fn detect_frontiers_edge(grid: &OccupancyGrid) -> Vec<CellIndex> {
    let opened = morphological_open(grid);
    collect(grid, |i| opened[i])
}

/// Frontier cells of the unfiltered free mask.
pub fn detect_frontiers_raw(grid: &OccupancyGrid) -> Vec<CellIndex> {
    collect(grid, |i| grid.cells()[i] == Cell::Free)
}

fn collect(grid: &OccupancyGrid, keep: impl Fn(usize) -> bool) -> Vec<CellIndex> {
    (0..grid.len())
        .filter(|&i| keep(i))
        .map(|i| grid.unflat(i))
        .filter(|&c| grid.borders_unknown(c))
        .collect()
}
