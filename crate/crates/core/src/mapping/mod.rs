//! Occupancy mapping and frontier detection.
//!
//! Frontier points come from two detectors that run on the same grid
//! snapshot: a morphological boundary extractor and an incrementally grown
//! random tree. Their outputs are pooled, clustered with flat-kernel
//! mean-shift and filtered before any candidate is evaluated.

mod edge;
mod filter;
mod mean_shift;
mod raycast;
mod rrt;

pub use edge::{detect_frontiers_edge, detect_frontiers_raw, morphological_open};
pub use filter::{filter_frontiers, Reachability};
pub use mean_shift::{cluster_mean_shift, Cluster};
pub use raycast::{integrate_scan, integrate_scan_in_place};
pub use rrt::{detect_frontiers_rrt, RrtFrontierDetector};

use crate::grid::{Cell, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    Edge,
    Rrt,
}

/// A clustered frontier goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierCandidate {
    pub id: usize,
    pub position: (f64, f64),
    pub cluster_size: usize,
    pub detector: Detector,
    /// Decision epoch in which the candidate was created.
    pub created_at: usize,
}

/// Clusters pooled frontier points and turns each cluster into a candidate.
///
/// A centroid that does not land in a free cell is replaced by the member
/// point closest to it. The detector label is the majority among members.
pub fn candidates_from_points(
    points: &[((f64, f64), Detector)],
    grid: &OccupancyGrid,
    bandwidth: f64,
    epoch: usize,
    first_id: usize,
) -> crate::Result<Vec<FrontierCandidate>> {
    let coords: Vec<(f64, f64)> = points.iter().map(|p| p.0).collect();
    let clusters = cluster_mean_shift(&coords, bandwidth)?;
    let mut out = Vec::with_capacity(clusters.len());
    for cl in clusters {
        let in_free = |p: (f64, f64)| {
            grid.world_to_cell(p.0, p.1)
                .is_some_and(|c| grid.get(c) == Cell::Free)
        };
        let position = if in_free(cl.centroid) {
            Some(cl.centroid)
        } else {
            cl.members
                .iter()
                .map(|&m| coords[m])
                .filter(|&p| in_free(p))
                .min_by(|a, b| {
                    let da = (a.0 - cl.centroid.0).hypot(a.1 - cl.centroid.1);
                    let db = (b.0 - cl.centroid.0).hypot(b.1 - cl.centroid.1);
                    da.total_cmp(&db)
                })
        };
        let Some(position) = position else { continue };
        let rrt_votes = cl.members.iter().filter(|&&m| points[m].1 == Detector::Rrt).count();
        let detector = if 2 * rrt_votes > cl.members.len() {
            Detector::Rrt
        } else {
            Detector::Edge
        };
        out.push(FrontierCandidate {
            id: first_id + out.len(),
            position,
            cluster_size: cl.count,
            detector,
            created_at: epoch,
        });
    }
    Ok(out)
}
