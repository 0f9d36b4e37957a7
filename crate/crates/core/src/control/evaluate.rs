use std::cmp::Ordering;
use std::time::Instant;

use crate::config::ExplorationConfig;
use crate::error::Result;
use crate::graph::{PoseGraph, WeightedPoseGraph};
use crate::grid::OccupancyGrid;
use crate::hallucination::{weight_graph, Hallucinator, PredictedLoopClosure};
use crate::mapping::FrontierCandidate;
use crate::optimality::dopt_graph;
use crate::planning::{place_vertices, DijkstraField, PlannedPath};
use crate::world::LandmarkId;

/// The frozen state every candidate of one decision epoch is scored against.
pub struct Snapshot<'a> {
    pub grid: &'a OccupancyGrid,
    pub field: &'a DijkstraField,
    pub config: &'a ExplorationConfig,
    hallucinator: Hallucinator<'a>,
}

impl<'a> Snapshot<'a> {
    pub fn new(
        slam: &'a PoseGraph,
        grid: &'a OccupancyGrid,
        map_points: &'a [(LandmarkId, (f64, f64))],
        field: &'a DijkstraField,
        config: &'a ExplorationConfig,
    ) -> Result<Self> {
        let hallucinator = Hallucinator::new(slam, map_points, &config.camera, grid, config.loop_closure)?;
        Ok(Self { grid, field, config, hallucinator })
    }
}

#[derive(Debug, Clone)]
pub struct CandidateEvaluation {
    pub frontier: FrontierCandidate,
    pub path: PlannedPath,
    pub graph: WeightedPoseGraph,
    pub predicted_lc_edges: Vec<PredictedLoopClosure>,
    /// D-optimality of the predicted graph.
    pub utility: f64,
    pub eval_wall_time: f64,
}

/// Plans to the frontier, predicts the resulting graph and scores it.
/// Returns `None` when the frontier cannot be reached.
pub fn evaluate_candidate(frontier: &FrontierCandidate, snapshot: &Snapshot<'_>) -> Result<Option<CandidateEvaluation>> {
    let t0 = Instant::now();
    let Some(path) = snapshot.field.path_to(frontier.position.0, frontier.position.1) else {
        return Ok(None);
    };
    let branch = place_vertices(&path, snapshot.config.planner.spacing)?;
    let hg = snapshot.hallucinator.hallucinate(&branch)?;
    let graph = weight_graph(&hg, snapshot.grid, &snapshot.config.novelty)?;
    let utility = dopt_graph(&graph)?;
    Ok(Some(CandidateEvaluation {
        frontier: *frontier,
        path,
        graph,
        predicted_lc_edges: hg.predicted_lc_edges,
        utility,
        eval_wall_time: t0.elapsed().as_secs_f64(),
    }))
}

fn rank(a: &CandidateEvaluation, b: &CandidateEvaluation) -> Ordering {
    let scale = a.utility.abs().max(b.utility.abs());
    if (a.utility - b.utility).abs() > 1e-9 * scale {
        return b.utility.total_cmp(&a.utility);
    }
    a.path
        .cost
        .total_cmp(&b.path.cost)
        .then_with(|| a.frontier.id.cmp(&b.frontier.id))
}

/// Index of the highest-utility evaluation. Utilities within a relative
/// `1e-9` tie and fall back to the cheaper path, then the lower frontier id.
pub fn select_frontier(evals: &[CandidateEvaluation]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, e) in evals.iter().enumerate() {
        match best {
            Some(b) if rank(e, &evals[b]) != Ordering::Less => {}
            _ => best = Some(i),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::Detector;

    fn eval(id: usize, utility: f64, cost: f64) -> CandidateEvaluation {
        CandidateEvaluation {
            frontier: FrontierCandidate {
                id,
                position: (0.0, 0.0),
                cluster_size: 1,
                detector: Detector::Edge,
                created_at: 0,
            },
            path: PlannedPath { waypoints: vec![(0.0, 0.0)], cost },
            graph: WeightedPoseGraph::unit(PoseGraph::new()),
            predicted_lc_edges: vec![],
            utility,
            eval_wall_time: 0.0,
        }
    }

    #[test]
    fn argmax_and_ties() {
        assert_eq!(select_frontier(&[]), None);
        assert_eq!(select_frontier(&[eval(0, 1.0, 1.0)]), Some(0));
        let v = [eval(0, 2.1, 1.0), eval(1, 3.0, 1.0), eval(2, 0.5, 1.0)];
        assert_eq!(select_frontier(&v), Some(1));
        let tie = [eval(0, 4.0, 5.0), eval(1, 4.0, 3.0)];
        assert_eq!(select_frontier(&tie), Some(1));
        let id_tie = [eval(7, 4.0, 3.0), eval(2, 4.0 * (1.0 + 1e-12), 3.0)];
        assert_eq!(select_frontier(&id_tie), Some(1));
    }

    #[test]
    fn order_independent() {
        let v = vec![eval(3, 2.0, 4.0), eval(1, 2.0, 4.0), eval(5, 1.9, 1.0), eval(0, 2.0, 6.0)];
        let pick = v[select_frontier(&v).unwrap()].frontier.id;
        let mut r = v.clone();
        r.reverse();
        assert_eq!(r[select_frontier(&r).unwrap()].frontier.id, pick);
        assert_eq!(pick, 1);
    }
}
