//! The exploration loop: sense, map, detect frontiers, plan, predict the
//! resulting pose-graph for each frontier, score it, pick the best and
//! drive there.

mod episode;
mod evaluate;
mod slam;
mod truth;

pub use episode::{run_episode, run_episode_with, EpisodeLog, EpochRecord, TrajectoryError, CSV_HEADER};
pub use evaluate::{evaluate_candidate, select_frontier, CandidateEvaluation, Snapshot};
pub use slam::{Keyframe, SlamState};
pub use truth::{coverage, reachable_frontier_exists, true_reachable_cells};
