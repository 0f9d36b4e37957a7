use std::f64::consts::TAU;

use crate::config::SensorModel;
use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::grid::{Cell, OccupancyGrid};
use crate::world::World;

/// Returns a copy of `grid` updated with one scan taken from `pose`.
pub fn integrate_scan(
    grid: &OccupancyGrid,
    pose: &Pose2,
    world: &World,
    sensor: &SensorModel,
) -> Result<OccupancyGrid> {
    let mut out = grid.clone();
    integrate_scan_in_place(&mut out, pose, world, sensor)?;
    Ok(out)
}

/// Casts rays across the field of view at an angular step of
/// `atan2(resolution, max_range)`. Cells crossed before the first obstacle
/// become free, the cell just past the hit point becomes occupied, and cells
/// beyond are left alone. Occupied cells never revert to free.
pub fn integrate_scan_in_place(
    grid: &mut OccupancyGrid,
    pose: &Pose2,
    world: &World,
    sensor: &SensorModel,
) -> Result<()> {
    if grid.world_to_cell(pose.x, pose.y).is_none() {
        return Err(Error::invalid("scan pose lies outside the grid"));
    }
    let res = grid.resolution();
    let step = res.atan2(sensor.max_range);
    let full_circle = sensor.fov >= TAU - 1e-12;
    let (start, count, inc) = if full_circle {
        let n = (TAU / step).ceil() as usize;
        (-std::f64::consts::PI, n, TAU / n as f64)
    } else {
        let n = (sensor.fov / step).ceil() as usize;
        (-0.5 * sensor.fov, n + 1, sensor.fov / n as f64)
    };
    let origin = (pose.x, pose.y);
    let mut to_free = Vec::new();
    for r in 0..count {
        let angle = pose.theta + start + r as f64 * inc;
        let dir = (angle.cos(), angle.sin());
        let hit = world.first_hit(origin.0, origin.1, dir.0, dir.1);
        let reach = hit.map_or(sensor.max_range, |h| h.min(sensor.max_range));
        to_free.clear();
        grid.walk_ray(origin, dir, reach - 1e-9 * res, |c| {
            to_free.push(c);
            true
        });
        for &c in &to_free {
            if grid.get(c) != Cell::Occupied {
                grid.set(c, Cell::Free);
            }
        }
        if let Some(h) = hit.filter(|&h| h <= sensor.max_range) {
            let d = h + 1e-6 * res;
            if let Some(c) = grid.world_to_cell(origin.0 + dir.0 * d, origin.1 + dir.1 * d) {
                grid.set(c, Cell::Occupied);
            }
        }
    }
    Ok(())
}
