use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::ExplorationConfig;
use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::graph::PoseGraph;
use crate::graph_io::fmt_sig9;
use crate::grid::{Cell, OccupancyGrid};
use crate::mapping::{
    candidates_from_points, detect_frontiers_edge, detect_frontiers_raw, filter_frontiers,
    integrate_scan_in_place, Detector, FrontierCandidate, RrtFrontierDetector,
};
use crate::planning::{dijkstra_field, inflate_costmap, place_vertices, PlannedPath};
use crate::world::World;

use super::evaluate::{evaluate_candidate, select_frontier, CandidateEvaluation, Snapshot};
use super::slam::{mix, SlamState};
use super::truth::{coverage, true_reachable_cells};

pub const CSV_HEADER: &str =
    "epoch,x_est,y_est,theta_est,x_true,y_true,theta_true,n_frontiers,chosen_frontier,utility,coverage,decision_time_s,epoch_time_s";

const TIMING_HEADER: &str =
    "epoch,n_candidates,detection_wall_s,decision_wall_s,mean_eval_wall_s,epoch_wall_s,mission_time_s";

/// One decision epoch. Poses and coverage are taken when the decision is
/// made; the terminal epoch has no chosen frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub estimate: Pose2,
    pub truth: Pose2,
    pub n_frontiers: usize,
    pub chosen_frontier: Option<usize>,
    pub utility: Option<f64>,
    /// `(frontier id, utility)` for every evaluated candidate.
    pub candidate_utilities: Vec<(usize, f64)>,
    pub coverage: f64,
    /// Number of SLAM vertices the candidates were evaluated against.
    pub slam_vertices: usize,
    /// Predicted loop closures with probability 1, over all candidates.
    pub certain_closures: usize,
    /// Predicted loop closures with probability 1 on the chosen branch.
    pub chosen_certain_closures: usize,
    /// Simulated travel time of this epoch.
    pub travel_time_s: f64,
    pub detection_wall_s: f64,
    pub decision_wall_s: f64,
    pub eval_wall_s: Vec<f64>,
    pub epoch_wall_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryError {
    pub rmse: f64,
    pub max: f64,
    pub last: f64,
}

#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub records: Vec<EpochRecord>,
    /// False when the epoch cap stopped the episode.
    pub complete: bool,
    pub final_graph: PoseGraph,
    pub final_grid: OccupancyGrid,
    pub final_coverage: f64,
    pub trajectory_error: TrajectoryError,
    pub mission_time_s: f64,
    pub total_wall_s: f64,
}

impl EpisodeLog {
    /// Per-epoch CSV. Every column is a function of the inputs and the seed:
    /// `epoch_time_s` is simulated travel time, and `decision_time_s` is the
    /// simulated time spent deciding, which is zero because the simulated
    /// world is frozen while candidates are scored. Measured wall times go
    /// to [`timing_csv`](Self::timing_csv).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6},{:.3},{:.3}",
                r.epoch,
                r.estimate.x,
                r.estimate.y,
                r.estimate.theta,
                r.truth.x,
                r.truth.y,
                r.truth.theta,
                r.n_frontiers,
                r.chosen_frontier.map(|c| c.to_string()).unwrap_or_default(),
                r.utility.map(fmt_sig9).unwrap_or_default(),
                r.coverage,
                0.0,
                r.travel_time_s,
            );
        }
        out
    }

    /// Measured wall-clock times per epoch.
    pub fn timing_csv(&self) -> String {
        let mut out = String::from(TIMING_HEADER);
        out.push('\n');
        for r in &self.records {
            let mean = if r.eval_wall_s.is_empty() {
                0.0
            } else {
                r.eval_wall_s.iter().sum::<f64>() / r.eval_wall_s.len() as f64
            };
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.3}",
                r.epoch,
                r.eval_wall_s.len(),
                r.detection_wall_s,
                r.decision_wall_s,
                mean,
                r.epoch_wall_s,
                r.travel_time_s
            );
        }
        out
    }

    pub fn decision_wall_s(&self) -> f64 {
        self.records.iter().map(|r| r.decision_wall_s).sum()
    }

    /// Mean wall time of a single candidate evaluation.
    pub fn mean_eval_wall_s(&self) -> f64 {
        let all: Vec<f64> = self.records.iter().flat_map(|r| r.eval_wall_s.iter().copied()).collect();
        if all.is_empty() {
            0.0
        } else {
            all.iter().sum::<f64>() / all.len() as f64
        }
    }

    /// Decision wall time over the mission duration, where the mission
    /// lasts the simulated travel time plus all computation.
    pub fn decision_fraction(&self) -> f64 {
        self.decision_wall_s() / (self.mission_time_s + self.total_wall_s)
    }

    /// Decision wall time over computation time alone.
    pub fn decision_compute_fraction(&self) -> f64 {
        self.decision_wall_s() / self.total_wall_s
    }

    pub fn certain_closures(&self) -> usize {
        self.records.iter().map(|r| r.certain_closures).sum()
    }

    pub fn chosen_certain_closures(&self) -> usize {
        self.records.iter().map(|r| r.chosen_certain_closures).sum()
    }
}

struct Robot<'a> {
    world: &'a World,
    config: &'a ExplorationConfig,
    grid: OccupancyGrid,
    slam: SlamState,
    truth: Pose2,
}

impl Robot<'_> {
    fn sense(&mut self, pose: Pose2) -> Result<()> {
        self.truth = pose;
        integrate_scan_in_place(&mut self.grid, &pose, self.world, &self.config.scan)?;
        self.slam.add_keyframe(pose, self.world, &self.config.camera)?;
        Ok(())
    }

    /// Follows the path, sensing every `sense_interval` meters, until the
    /// goal is reached or a newly mapped obstacle blocks the rest of the
    /// path. Returns the distance travelled.
    fn drive(&mut self, path: &PlannedPath) -> Result<f64> {
        let length = path.length();
        let stops = if length < 1e-9 {
            let (x, y) = path.goal();
            vec![Pose2::new(x, y, self.truth.theta)]
        } else {
            place_vertices(path, self.config.sense_interval)?
        };
        let mut arc = Vec::with_capacity(path.waypoints.len());
        let mut s = 0.0;
        for (i, w) in path.waypoints.iter().enumerate() {
            if i > 0 {
                let p = path.waypoints[i - 1];
                s += (w.0 - p.0).hypot(w.1 - p.1);
            }
            arc.push(s);
        }
        let mut travelled = 0.0;
        for (k, stop) in stops.iter().enumerate() {
            travelled += self.truth.distance_to(stop);
            self.sense(*stop)?;
            let reached = ((k + 1) as f64 * self.config.sense_interval).min(length);
            let blocked = path.waypoints.iter().zip(&arc).any(|(w, &a)| {
                a > reached + 1e-9
                    && self
                        .grid
                        .world_to_cell(w.0, w.1)
                        .is_some_and(|c| self.grid.get(c) == Cell::Occupied)
            });
            if blocked {
                break;
            }
        }
        Ok(travelled)
    }
}

/// Runs one exploration episode.
pub fn run_episode(world: &World, config: &ExplorationConfig, seed: u64) -> Result<EpisodeLog> {
    run_episode_with(world, config, seed, |_, _| {})
}

/// Like [`run_episode`], calling `on_epoch` with every epoch's evaluated
/// candidates before the robot moves.
pub fn run_episode_with(
    world: &World,
    config: &ExplorationConfig,
    seed: u64,
    mut on_epoch: impl FnMut(usize, &[CandidateEvaluation]),
) -> Result<EpisodeLog> {
    config.validate()?;
    let wall = Instant::now();
    let b = world.bounds();
    let start = world.start();
    if !b.contains(start.x, start.y) || world.inside_obstacle(start.x, start.y) {
        return Err(Error::invalid("start pose is not in free space"));
    }
    let grid = OccupancyGrid::covering(config.mapping.resolution, b.xmin, b.ymin, b.xmax, b.ymax)?;
    let reachable = true_reachable_cells(world, &grid, start.position());
    let threads = if config.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?,
        )
    } else {
        None
    };

    let mut robot = Robot { world, config, grid, slam: SlamState::new(seed), truth: start };
    for k in 0..4 {
        let heading = start.theta + k as f64 * std::f64::consts::FRAC_PI_2;
        robot.sense(Pose2::new(start.x, start.y, heading))?;
    }

    let mut rrt: Option<RrtFrontierDetector> = None;
    let mut pool: Vec<FrontierCandidate> = Vec::new();
    let mut next_id = 0usize;
    let mut mission_time_s = 0.0;
    let mut records = Vec::new();
    let mut complete = false;

    for epoch in 0..config.epoch_cap {
        let epoch_wall = Instant::now();
        let grid = &robot.grid;
        let costs = inflate_costmap(grid, config.planner.inflation_radius, config.planner.max_inflated_cost)?;
        let here = robot.truth.position();
        let origin = match grid.world_to_cell(here.0, here.1) {
            Some(c) if !costs.is_lethal(c) => here,
            _ => costs
                .nearest_free(here.0, here.1)
                .map(|c| grid.cell_center(c))
                .ok_or_else(|| Error::invalid("map has no traversable cell"))?,
        };
        let field = dijkstra_field(&costs, origin)?;

        let detect = Instant::now();
        let mut points: Vec<((f64, f64), Detector)> = detect_frontiers_edge(grid)
            .into_iter()
            .map(|c| (grid.cell_center(c), Detector::Edge))
            .collect();
        let tree = match &mut rrt {
            Some(t) => t,
            None => rrt.insert(RrtFrontierDetector::new(grid, origin, config.mapping.rrt_step, mix(seed, 3))?),
        };
        points.extend(tree.grow(grid, config.mapping.rrt_iterations).into_iter().map(|p| (p, Detector::Rrt)));
        let fresh = candidates_from_points(&points, grid, config.mapping.bandwidth, epoch, next_id)?;
        next_id += fresh.len();
        let mut pooled = fresh;
        pooled.extend(pool.iter().copied());
        let filter = |c: &[FrontierCandidate]| {
            filter_frontiers(c, grid, &field, config.mapping.min_info_radius_cells, config.mapping.max_age, epoch)
        };
        let mut survivors = filter(&pooled);
        if survivors.is_empty() {
            let raw: Vec<FrontierCandidate> = detect_frontiers_raw(grid)
                .into_iter()
                .enumerate()
                .map(|(k, c)| FrontierCandidate {
                    id: next_id + k,
                    position: grid.cell_center(c),
                    cluster_size: 1,
                    detector: Detector::Edge,
                    created_at: epoch,
                })
                .collect();
            next_id += raw.len();
            survivors = filter(&raw);
        }
        let detection_wall_s = detect.elapsed().as_secs_f64();
        pool = survivors.clone();

        let estimate = robot.slam.last().expect("spin added keyframes").estimate;
        let truth = robot.truth;
        let cov = coverage(grid, &reachable);
        if survivors.is_empty() {
            records.push(EpochRecord {
                epoch,
                estimate,
                truth,
                n_frontiers: 0,
                chosen_frontier: None,
                utility: None,
                candidate_utilities: vec![],
                coverage: cov,
                slam_vertices: robot.slam.keyframes().len(),
                certain_closures: 0,
                chosen_certain_closures: 0,
                travel_time_s: 0.0,
                detection_wall_s,
                decision_wall_s: 0.0,
                eval_wall_s: vec![],
                epoch_wall_s: epoch_wall.elapsed().as_secs_f64(),
            });
            complete = true;
            break;
        }

        let slam_graph = robot.slam.graph(config)?;
        let map_points = robot.slam.map_points();
        let decide = Instant::now();
        let snapshot = Snapshot::new(&slam_graph, grid, &map_points, &field, config)?;
        let results: Vec<Result<Option<CandidateEvaluation>>> = match &threads {
            Some(tp) => tp.install(|| survivors.par_iter().map(|f| evaluate_candidate(f, &snapshot)).collect()),
            None => survivors.iter().map(|f| evaluate_candidate(f, &snapshot)).collect(),
        };
        let evals: Vec<CandidateEvaluation> =
            results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        let chosen = select_frontier(&evals);
        let decision_wall_s = decide.elapsed().as_secs_f64();
        on_epoch(epoch, &evals);

        let certain = |e: &CandidateEvaluation| e.predicted_lc_edges.iter().filter(|lc| lc.p_lc == 1.0).count();
        let mut record = EpochRecord {
            epoch,
            estimate,
            truth,
            n_frontiers: survivors.len(),
            chosen_frontier: None,
            utility: None,
            candidate_utilities: evals.iter().map(|e| (e.frontier.id, e.utility)).collect(),
            coverage: cov,
            slam_vertices: slam_graph.num_vertices(),
            certain_closures: evals.iter().map(certain).sum(),
            chosen_certain_closures: 0,
            travel_time_s: 0.0,
            detection_wall_s,
            decision_wall_s,
            eval_wall_s: evals.iter().map(|e| e.eval_wall_time).collect(),
            epoch_wall_s: 0.0,
        };
        let Some(ci) = chosen else {
            record.epoch_wall_s = epoch_wall.elapsed().as_secs_f64();
            records.push(record);
            return Err(Error::invalid("no filtered frontier could be planned to"));
        };
        let choice = &evals[ci];
        record.chosen_frontier = Some(choice.frontier.id);
        record.utility = Some(choice.utility);
        record.chosen_certain_closures = certain(choice);
        let chosen_id = choice.frontier.id;
        let path = choice.path.clone();
        drop(snapshot);
        drop(evals);

        let travelled = robot.drive(&path)?;
        pool.retain(|c| c.id != chosen_id);
        record.travel_time_s = travelled / config.speed;
        mission_time_s += record.travel_time_s;
        record.epoch_wall_s = epoch_wall.elapsed().as_secs_f64();
        records.push(record);
    }

    let final_graph = robot.slam.graph(config)?;
    let errors: Vec<f64> = robot
        .slam
        .keyframes()
        .iter()
        .map(|k| k.estimate.distance_to(&k.truth))
        .collect();
    let trajectory_error = TrajectoryError {
        rmse: (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt(),
        max: errors.iter().copied().fold(0.0, f64::max),
        last: *errors.last().unwrap_or(&0.0),
    };
    let final_coverage = coverage(&robot.grid, &reachable);
    Ok(EpisodeLog {
        records,
        complete,
        final_graph,
        final_grid: robot.grid,
        final_coverage,
        trajectory_error,
        mission_time_s,
        total_wall_s: wall.elapsed().as_secs_f64(),
    })
}
