//! Ternary occupancy grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Unknown,
    Free,
    Occupied,
}

/// Integer cell coordinates: `col` grows with x, `row` grows with y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub col: usize,
    pub row: usize,
}

impl CellIndex {
    pub fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Row 0 holds the minimum y. The grid origin is the world position of the
/// lower-left corner of cell (0, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    resolution: f64,
    origin_x: f64,
    origin_y: f64,
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

pub const NEIGHBORS_8: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl OccupancyGrid {
    pub fn new(resolution: f64, origin_x: f64, origin_y: f64, width: usize, height: usize) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::invalid("grid resolution must be positive"));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("grid must have at least one cell"));
        }
        Ok(Self {
            resolution,
            origin_x,
            origin_y,
            width,
            height,
            cells: vec![Cell::Unknown; width * height],
        })
    }

    /// Smallest grid covering the rectangle `[xmin, xmax] × [ymin, ymax]`.
    pub fn covering(resolution: f64, xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        if !(resolution > 0.0) {
            return Err(Error::invalid("grid resolution must be positive"));
        }
        let w = (((xmax - xmin) / resolution) - 1e-9).ceil().max(1.0) as usize;
        let h = (((ymax - ymin) / resolution) - 1e-9).ceil().max(1.0) as usize;
        Self::new(resolution, xmin, ymin, w, h)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn flat(&self, c: CellIndex) -> usize {
        c.row * self.width + c.col
    }

    pub fn unflat(&self, i: usize) -> CellIndex {
        CellIndex::new(i % self.width, i / self.width)
    }

    pub fn get(&self, c: CellIndex) -> Cell {
        self.cells[self.flat(c)]
    }

    pub fn set(&mut self, c: CellIndex, v: Cell) {
        let i = self.flat(c);
        self.cells[i] = v;
    }

    /// Cell containing a world point, or `None` outside the grid.
    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<CellIndex> {
        let fx = ((x - self.origin_x) / self.resolution).floor();
        let fy = ((y - self.origin_y) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some(CellIndex::new(fx as usize, fy as usize))
    }

    /// Unbounded cell coordinates of a world point.
    pub fn world_to_cell_signed(&self, x: f64, y: f64) -> (i64, i64) {
        (
            ((x - self.origin_x) / self.resolution).floor() as i64,
            ((y - self.origin_y) / self.resolution).floor() as i64,
        )
    }

    pub fn cell_center(&self, c: CellIndex) -> (f64, f64) {
        (
            self.origin_x + (c.col as f64 + 0.5) * self.resolution,
            self.origin_y + (c.row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn contains_signed(&self, col: i64, row: i64) -> bool {
        col >= 0 && row >= 0 && (col as usize) < self.width && (row as usize) < self.height
    }

    pub fn offset(&self, c: CellIndex, dc: i64, dr: i64) -> Option<CellIndex> {
        let col = c.col as i64 + dc;
        let row = c.row as i64 + dr;
        self.contains_signed(col, row)
            .then(|| CellIndex::new(col as usize, row as usize))
    }

    pub fn neighbors8(&self, c: CellIndex) -> impl Iterator<Item = CellIndex> + '_ {
        NEIGHBORS_8
            .iter()
            .filter_map(move |&(dc, dr)| self.offset(c, dc, dr))
    }

    pub fn count(&self, state: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    /// Whether `c` has an unknown neighbor that can actually be entered from
    /// `c`. A diagonal neighbor does not count when both cells flanking the
    /// diagonal are occupied, since nothing passes that corner.
    pub fn borders_unknown(&self, c: CellIndex) -> bool {
        NEIGHBORS_8.iter().any(|&(dc, dr)| {
            let Some(n) = self.offset(c, dc, dr) else {
                return false;
            };
            if self.get(n) != Cell::Unknown {
                return false;
            }
            if dc != 0 && dr != 0 {
                let a = self.offset(c, dc, 0).map(|x| self.get(x));
                let b = self.offset(c, 0, dr).map(|x| self.get(x));
                if a == Some(Cell::Occupied) && b == Some(Cell::Occupied) {
                    return false;
                }
            }
            true
        })
    }

    /// Visits, in order, the cells crossed by the ray `origin + t·dir` for
    /// `t` in `[0, length)` (grid traversal in the style of Amanatides & Woo).
    /// Stops early when the ray leaves the grid or `visit` returns `false`.
    pub fn walk_ray(
        &self,
        origin: (f64, f64),
        dir: (f64, f64),
        length: f64,
        mut visit: impl FnMut(CellIndex) -> bool,
    ) {
        let (ox, oy) = origin;
        let (dx, dy) = dir;
        let (mut cx, mut cy) = self.world_to_cell_signed(ox, oy);
        let res = self.resolution;
        let axis = |c: i64, o: f64, org: f64, d: f64| -> (i64, f64, f64) {
            if d > 0.0 {
                (1, ((c + 1) as f64 * res + org - o) / d, res / d)
            } else if d < 0.0 {
                (-1, (c as f64 * res + org - o) / d, -res / d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (sx, mut tx, ddx) = axis(cx, ox, self.origin_x, dx);
        let (sy, mut ty, ddy) = axis(cy, oy, self.origin_y, dy);
        loop {
            if !self.contains_signed(cx, cy) {
                return;
            }
            if !visit(CellIndex::new(cx as usize, cy as usize)) {
                return;
            }
            let t_next = tx.min(ty);
            if t_next >= length {
                return;
            }
            if tx < ty {
                cx += sx;
                tx += ddx;
            } else {
                cy += sy;
                ty += ddy;
            }
        }
    }

    /// Cells whose centers lie within `radius` meters of `(x, y)`, as signed
    /// coordinates that may fall outside the grid.
    pub fn disc_cells(&self, x: f64, y: f64, radius: f64) -> Vec<(i64, i64)> {
        let res = self.resolution;
        let c0 = ((x - radius - self.origin_x) / res).floor() as i64 - 1;
        let c1 = ((x + radius - self.origin_x) / res).ceil() as i64 + 1;
        let r0 = ((y - radius - self.origin_y) / res).floor() as i64 - 1;
        let r1 = ((y + radius - self.origin_y) / res).ceil() as i64 + 1;
        let mut out = Vec::new();
        for row in r0..=r1 {
            for col in c0..=c1 {
                let cx = self.origin_x + (col as f64 + 0.5) * res;
                let cy = self.origin_y + (row as f64 + 0.5) * res;
                if (cx - x).hypot(cy - y) <= radius {
                    out.push((col, row));
                }
            }
        }
        out
    }

    /// Binary PGM (P5): unknown = 128, free = 254, occupied = 0, first
    /// written row is row 0 (minimum y).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.cells.iter().map(|c| match c {
            Cell::Unknown => 128u8,
            Cell::Free => 254,
            Cell::Occupied => 0,
        }));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_dims() {
        assert!(OccupancyGrid::new(0.0, 0.0, 0.0, 3, 3).is_err());
        assert!(OccupancyGrid::new(0.1, 0.0, 0.0, 0, 3).is_err());
    }

    #[test]
    fn covering_sizes() {
        let g = OccupancyGrid::covering(0.1, 0.0, 0.0, 6.0, 4.0).unwrap();
        assert_eq!((g.width(), g.height()), (60, 40));
    }

    #[test]
    fn pgm_layout() {
        let mut g = OccupancyGrid::new(1.0, 0.0, 0.0, 2, 2).unwrap();
        g.set(CellIndex::new(1, 0), Cell::Free);
        g.set(CellIndex::new(0, 1), Cell::Occupied);
        let pgm = g.to_pgm();
        assert!(pgm.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&pgm[pgm.len() - 4..], &[128, 254, 0, 128]);
    }

    #[test]
    fn corner_blocked_diagonal_is_not_a_border() {
        let mut g = OccupancyGrid::new(1.0, 0.0, 0.0, 2, 2).unwrap();
        g.set(CellIndex::new(0, 0), Cell::Free);
        g.set(CellIndex::new(1, 0), Cell::Occupied);
        g.set(CellIndex::new(0, 1), Cell::Occupied);
        assert!(!g.borders_unknown(CellIndex::new(0, 0)));
        g.set(CellIndex::new(0, 1), Cell::Free);
        assert!(g.borders_unknown(CellIndex::new(0, 0)));
    }

    #[test]
    fn ray_walk_visits_straight_line() {
        let g = OccupancyGrid::new(1.0, 0.0, 0.0, 10, 10).unwrap();
        let mut seen = Vec::new();
        g.walk_ray((0.5, 0.5), (1.0, 0.0), 3.2, |c| {
            seen.push(c);
            true
        });
        assert_eq!(seen, (0..4).map(|i| CellIndex::new(i, 0)).collect::<Vec<_>>());
        let mut diag = Vec::new();
        g.walk_ray((0.5, 0.5), (0.6, 0.8), 20.0, |c| {
            diag.push(c);
            true
        });
        assert_eq!(diag[0], CellIndex::new(0, 0));
        assert!(diag.windows(2).all(|w| {
            let d = (w[0].col as i64 - w[1].col as i64).abs() + (w[0].row as i64 - w[1].row as i64).abs();
            d == 1
        }));
        assert_eq!(diag.last().unwrap().row, 9);
    }

    #[test]
    fn disc_cell_count() {
        let g = OccupancyGrid::new(0.1, 0.0, 0.0, 10, 10).unwrap();
        let n = g.disc_cells(0.5, 0.5, 1.0).len() as f64;
        assert!((n - std::f64::consts::PI * 100.0).abs() < 20.0);
    }

    proptest! {
        #[test]
        fn world_cell_round_trip(col in 0usize..50, row in 0usize..40, fx in 0.01..0.99f64, fy in 0.01..0.99f64) {
            let g = OccupancyGrid::new(0.1, -2.0, 3.0, 50, 40).unwrap();
            let x = -2.0 + (col as f64 + fx) * 0.1;
            let y = 3.0 + (row as f64 + fy) * 0.1;
            let c = g.world_to_cell(x, y).unwrap();
            prop_assert_eq!(c, CellIndex::new(col, row));
            let (cx, cy) = g.cell_center(c);
            prop_assert_eq!(g.world_to_cell(cx, cy), Some(c));
        }
    }
}
