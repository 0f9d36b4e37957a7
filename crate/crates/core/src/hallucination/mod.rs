//! Prediction of the pose-graph a robot would hold after travelling to a
//! frontier: predicted vertices along the planned path, predicted loop
//! closures from expected covisibility, and per-edge information weights.

mod covisible;
mod edges;
mod novelty;

pub use covisible::{expected_covisible, lc_probability};
pub use edges::{lc_edge_hessian, odom_edge_hessian};
pub use novelty::{apply_novelty, novelty_sigma};

use std::collections::BTreeSet;

use crate::config::{LoopClosureParams, NoveltyParams, SensorModel};
use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::graph::{EdgeKind, PoseGraph, VertexId, WeightedPoseGraph, HALLUCINATED_ID_OFFSET};
use crate::grid::OccupancyGrid;
use crate::info::InfoMatrix;
use crate::optimality::dopt_info;
use crate::world::LandmarkId;

/// A loop closure expected between a predicted vertex and an existing one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedLoopClosure {
    pub existing: VertexId,
    pub branch: VertexId,
    pub p_lc: f64,
    pub n_p: usize,
}

/// A SLAM graph extended with a predicted branch. Edges at index
/// `slam_edge_count` and beyond are predicted; their information matrices
/// are the un-scaled Hessians before novelty weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct HallucinatedGraph {
    pub graph: PoseGraph,
    pub slam_edge_count: usize,
    pub branch_vertex_ids: Vec<VertexId>,
    pub predicted_lc_edges: Vec<PredictedLoopClosure>,
}

/// Expected-covisibility cache for one frozen SLAM snapshot. Building it
/// once per decision epoch lets every candidate branch reuse the visible
/// point sets of the existing vertices.
#[derive(Debug, Clone)]
pub struct Hallucinator<'a> {
    slam: &'a PoseGraph,
    map_points: &'a [(LandmarkId, (f64, f64))],
    sensor: &'a SensorModel,
    grid: &'a OccupancyGrid,
    params: LoopClosureParams,
    visible: Vec<BTreeSet<LandmarkId>>,
    odom_info: InfoMatrix,
}

impl<'a> Hallucinator<'a> {
    pub fn new(
        slam: &'a PoseGraph,
        map_points: &'a [(LandmarkId, (f64, f64))],
        sensor: &'a SensorModel,
        grid: &'a OccupancyGrid,
        params: LoopClosureParams,
    ) -> Result<Self> {
        if slam.is_empty() {
            return Err(Error::invalid("SLAM graph is empty"));
        }
        params.validate()?;
        let odom_info = odom_edge_hessian(slam)?;
        let visible = slam
            .vertices()
            .iter()
            .map(|(_, p)| expected_covisible(p, map_points, sensor, grid).into_iter().collect())
            .collect();
        Ok(Self { slam, map_points, sensor, grid, params, visible, odom_info })
    }

    /// Appends `branch` to a copy of the SLAM graph.
    pub fn hallucinate(&self, branch: &[Pose2]) -> Result<HallucinatedGraph> {
        let mut graph = self.slam.clone();
        let slam_edge_count = graph.num_edges();
        let (mut prev, _) = self.slam.last_vertex().expect("graph is non-empty");
        let mut branch_vertex_ids = Vec::with_capacity(branch.len());
        let mut predicted_lc_edges = Vec::new();
        for (k, pose) in branch.iter().enumerate() {
            let id = HALLUCINATED_ID_OFFSET + k;
            graph.add_vertex(id, *pose)?;
            graph.connect(prev, id, EdgeKind::Odometry, self.odom_info)?;
            let seen: BTreeSet<LandmarkId> =
                expected_covisible(pose, self.map_points, self.sensor, self.grid).into_iter().collect();
            if !seen.is_empty() {
                for ((existing, _), vis) in self.slam.vertices().iter().zip(&self.visible) {
                    let common: Vec<LandmarkId> = vis.intersection(&seen).copied().collect();
                    let p_lc = lc_probability(common.len(), &self.params);
                    if p_lc <= 0.0 {
                        continue;
                    }
                    let pts: Vec<(f64, f64)> = common.iter().map(|id| self.point(*id)).collect();
                    let info = lc_edge_hessian(pose, &pts, p_lc, self.sensor)?;
                    graph.connect(*existing, id, EdgeKind::LoopClosure, info)?;
                    predicted_lc_edges.push(PredictedLoopClosure {
                        existing: *existing,
                        branch: id,
                        p_lc,
                        n_p: common.len(),
                    });
                }
            }
            branch_vertex_ids.push(id);
            prev = id;
        }
        Ok(HallucinatedGraph { graph, slam_edge_count, branch_vertex_ids, predicted_lc_edges })
    }

    fn point(&self, id: LandmarkId) -> (f64, f64) {
        self.map_points
            .iter()
            .find(|(pid, _)| *pid == id)
            .map(|(_, p)| *p)
            .expect("covisible ids come from the map point list")
    }
}

/// One-shot form of [`Hallucinator::hallucinate`].
pub fn hallucinate_graph(
    slam: &PoseGraph,
    branch: &[Pose2],
    map_points: &[(LandmarkId, (f64, f64))],
    sensor: &SensorModel,
    grid: &OccupancyGrid,
    params: LoopClosureParams,
) -> Result<HallucinatedGraph> {
    Hallucinator::new(slam, map_points, sensor, grid, params)?.hallucinate(branch)
}

/// Weights every edge by the D-optimality of its information. Predicted
/// edges are first scaled by the novelty of their far (predicted) vertex,
/// and the scaled matrix replaces the stored information.
pub fn weight_graph(
    hg: &HallucinatedGraph,
    grid: &OccupancyGrid,
    novelty: &NoveltyParams,
) -> Result<WeightedPoseGraph> {
    if !(novelty.radius > 0.0) {
        return Err(Error::invalid("novelty radius must be positive"));
    }
    let mut graph = PoseGraph::new();
    for &(id, pose) in hg.graph.vertices() {
        graph.add_vertex(id, pose)?;
    }
    let mut weights = Vec::with_capacity(hg.graph.num_edges());
    let mut sigma_cache: Vec<(VertexId, f64)> = Vec::new();
    for (j, e) in hg.graph.edges().iter().enumerate() {
        let mut edge = e.clone();
        if j >= hg.slam_edge_count {
            let sigma = match sigma_cache.iter().find(|(v, _)| *v == e.to) {
                Some(&(_, s)) => s,
                None => {
                    let pose = hg.graph.pose(e.to).expect("edge endpoints exist");
                    let s = novelty_sigma(&pose, grid, novelty.radius)?;
                    sigma_cache.push((e.to, s));
                    s
                }
            };
            edge.info = apply_novelty(&e.info, sigma);
        }
        weights.push(dopt_info(&edge.info));
        graph.add_edge(edge)?;
    }
    WeightedPoseGraph::new(graph, weights)
}

#[cfg(test)]
mod tests;
