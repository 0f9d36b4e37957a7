use crate::config::{LoopClosureParams, SensorModel};
use crate::geometry::{normalize_angle, Pose2};
use crate::grid::{Cell, OccupancyGrid};
use crate::world::LandmarkId;

/// Ids of the map points inside the sensor frustum at `pose` whose line of
/// sight crosses no occupied cell. The cells holding the pose and the point
/// themselves are not tested.
pub fn expected_covisible(
    pose: &Pose2,
    map_points: &[(LandmarkId, (f64, f64))],
    sensor: &SensorModel,
    grid: &OccupancyGrid,
) -> Vec<LandmarkId> {
    let half_fov = 0.5 * sensor.fov;
    let origin_cell = grid.world_to_cell_signed(pose.x, pose.y);
    map_points
        .iter()
        .filter(|(_, (px, py))| {
            let (dx, dy) = (px - pose.x, py - pose.y);
            let d = dx.hypot(dy);
            if d > sensor.max_range || d < 1e-9 {
                return false;
            }
            if half_fov < std::f64::consts::PI && normalize_angle(dy.atan2(dx) - pose.theta).abs() > half_fov {
                return false;
            }
            let target = grid.world_to_cell_signed(*px, *py);
            let mut clear = true;
            grid.walk_ray((pose.x, pose.y), (dx / d, dy / d), d, |c| {
                let key = (c.col as i64, c.row as i64);
                if key != origin_cell && key != target && grid.get(c) == Cell::Occupied {
                    clear = false;
                }
                clear
            });
            clear
        })
        .map(|(id, _)| *id)
        .collect()
}

/// Probability that a predicted loop closure with `n_p` shared points
/// actually occurs: 0 below `n_p_min`, 1 above `n_p_max`, `n_p / n_p_max`
/// in between.
pub fn lc_probability(n_p: usize, params: &LoopClosureParams) -> f64 {
    if n_p < params.n_p_min {
        0.0
    } else if n_p > params.n_p_max {
        1.0
    } else {
        n_p as f64 / params.n_p_max as f64
    }
}
