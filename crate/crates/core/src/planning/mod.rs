//! Grid path planning and placement of predicted vertices along a path.

mod costmap;
mod dijkstra;
mod vertices;

pub use costmap::{inflate_costmap, CostGrid, LETHAL};
pub use dijkstra::{dijkstra_field, plan_dijkstra, DijkstraField};
pub use vertices::place_vertices;

/// A path through non-lethal cells, as world-frame cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedPath {
    pub waypoints: Vec<(f64, f64)>,
    /// Accumulated traversal cost: step length times destination cell cost.
    pub cost: f64,
}

impl PlannedPath {
    /// Geometric length of the polyline.
    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
            .sum()
    }

    pub fn goal(&self) -> (f64, f64) {
        *self.waypoints.last().expect("paths have at least one waypoint")
    }
}
