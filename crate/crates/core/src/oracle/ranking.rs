use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExplorationConfig;
use crate::control::SlamState;
use crate::error::Result;
use crate::geometry::{normalize_angle, Pose2};
use crate::grid::{Cell, OccupancyGrid};
use crate::hallucination::{weight_graph, Hallucinator};
use crate::optimality::{assemble_full_fim, dopt_graph, dopt_matrix};
use crate::planning::{place_vertices, PlannedPath};
use crate::world::{Landmark, Rect, World};

use super::spearman;

/// Largest hallucinated graph a scenario may produce.
pub const MAX_SCENARIO_VERTICES: usize = 15;

/// Utilities of the candidates of one randomized decision, scored by the
/// graph-Laplacian criterion and by the D-optimality of the full
/// information matrix of the same predicted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingScenario {
    pub utilities: Vec<f64>,
    pub fim_dopt: Vec<f64>,
    pub vertex_counts: Vec<usize>,
}

impl RankingScenario {
    pub fn spearman(&self) -> f64 {
        spearman(&self.utilities, &self.fim_dopt)
    }

    /// Whether both criteria pick the same best candidate.
    pub fn top1_agrees(&self) -> bool {
        let argmax = |v: &[f64]| {
            v.iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
        };
        argmax(&self.utilities) == argmax(&self.fim_dopt)
    }
}

/// Builds one scenario: a short SLAM trajectory through the real frontend
/// in a half-explored open area with random landmarks, then 4 to 8
/// straight-line branches toward random goals.
pub fn ranking_scenario(seed: u64) -> Result<RankingScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = ExplorationConfig::default();
    let bounds = Rect { xmin: 0.0, ymin: 0.0, xmax: 10.0, ymax: 10.0 };
    let landmarks: Vec<Landmark> = (0..40)
        .map(|id| Landmark { id, x: rng.random_range(0.3..9.7), y: rng.random_range(0.3..9.7) })
        .collect();
    let world = World::new(bounds, landmarks, vec![], vec![])?;

    let mut grid = OccupancyGrid::covering(0.1, 0.0, 0.0, 10.0, 10.0)?;
    let known_to = rng.random_range(4.0..6.0);
    for i in 0..grid.len() {
        let c = grid.unflat(i);
        if grid.cell_center(c).0 < known_to {
            grid.set(c, Cell::Free);
        }
    }

    let n_slam = rng.random_range(5..=7);
    let mut slam = SlamState::new(seed);
    let mut pose = Pose2::new(rng.random_range(1.0..2.5), rng.random_range(2.0..8.0), rng.random_range(-1.0..1.0));
    for _ in 0..n_slam {
        slam.add_keyframe(pose, &world, &config.camera)?;
        let heading = normalize_angle(pose.theta + rng.random_range(-0.6..0.6));
        let step = rng.random_range(0.5..0.9);
        let x = (pose.x + step * heading.cos()).clamp(0.5, known_to - 0.2);
        let y = (pose.y + step * heading.sin()).clamp(0.5, 9.5);
        pose = Pose2::new(x, y, heading);
    }
    let slam_graph = slam.graph(&config)?;
    let map_points = slam.map_points();
    let hallucinator = Hallucinator::new(&slam_graph, &map_points, &config.camera, &grid, config.loop_closure)?;
    let here = slam.last().expect("keyframes were added").truth;

    let budget = (MAX_SCENARIO_VERTICES - n_slam) as f64 * config.planner.spacing;
    let n_candidates = rng.random_range(4..=8);
    let mut out = RankingScenario { utilities: vec![], fim_dopt: vec![], vertex_counts: vec![] };
    for _ in 0..n_candidates {
        let goal = (rng.random_range(0.5..9.5), rng.random_range(0.5..9.5));
        let (dx, dy) = (goal.0 - here.x, goal.1 - here.y);
        let dist = dx.hypot(dy).clamp(0.2, budget);
        let angle = dy.atan2(dx);
        let steps = (dist / 0.1).ceil() as usize;
        let waypoints = (0..=steps)
            .map(|k| {
                let s = dist * k as f64 / steps as f64;
                (here.x + s * angle.cos(), here.y + s * angle.sin())
            })
            .collect();
        let path = PlannedPath { waypoints, cost: dist };
        let branch = place_vertices(&path, config.planner.spacing)?;
        let hg = hallucinator.hallucinate(&branch)?;
        let wg = weight_graph(&hg, &grid, &config.novelty)?;
        out.utilities.push(dopt_graph(&wg)?);
        out.fim_dopt.push(dopt_matrix(&assemble_full_fim(&wg).0)?);
        out.vertex_counts.push(wg.num_vertices());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub scenarios: Vec<RankingScenario>,
}

impl RankingReport {
    pub fn spearman(&self) -> Vec<f64> {
        self.scenarios.iter().map(RankingScenario::spearman).collect()
    }

    pub fn median_spearman(&self) -> f64 {
        let mut v = self.spearman();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    pub fn top1_rate(&self) -> f64 {
        let hits = self.scenarios.iter().filter(|s| s.top1_agrees()).count();
        hits as f64 / self.scenarios.len().max(1) as f64
    }
}

/// Runs `count` scenarios with seeds derived from `seed`.
pub fn ranking_suite(count: usize, seed: u64) -> Result<RankingReport> {
    let scenarios = (0..count)
        .map(|k| ranking_scenario(seed.wrapping_mul(1_000_003).wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankingReport { scenarios })
}
