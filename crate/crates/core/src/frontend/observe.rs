use nalgebra::{Matrix2, Matrix2x3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::SensorModel;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose2};
use crate::graph::VertexId;
use crate::world::{LandmarkId, World};

/// A noisy range-bearing measurement of a landmark from a keyframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub pose_id: VertexId,
    pub landmark_id: LandmarkId,
    pub range: f64,
    /// Relative to the robot heading.
    pub bearing: f64,
}

/// Noise-free `(range, bearing)` of `landmark` seen from `pose`.
pub fn predict_measurement(pose: &Pose2, landmark: (f64, f64)) -> (f64, f64) {
    let dx = landmark.0 - pose.x;
    let dy = landmark.1 - pose.y;
    (dx.hypot(dy), normalize_angle(dy.atan2(dx) - pose.theta))
}

/// Observes every landmark inside range and field of view that no obstacle
/// occludes. Noise is drawn from a stream seeded by `seed`, one range and one
/// bearing sample per visible landmark in world order.
pub fn observe(
    pose_id: VertexId,
    true_pose: &Pose2,
    world: &World,
    sensor: &SensorModel,
    seed: u64,
) -> Vec<Observation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range_noise = Normal::new(0.0, sensor.range_noise_std).expect("validated std");
    let bearing_noise = Normal::new(0.0, sensor.bearing_noise_std).expect("validated std");
    let half_fov = 0.5 * sensor.fov;
    let mut out = Vec::new();
    for lm in world.landmarks() {
        let (r, b) = predict_measurement(true_pose, (lm.x, lm.y));
        if r <= 0.0 || r > sensor.max_range || b.abs() > half_fov {
            continue;
        }
        if world.occluded((true_pose.x, true_pose.y), (lm.x, lm.y)) {
            continue;
        }
        let nr = r + range_noise.sample(&mut rng);
        let nb = normalize_angle(b + bearing_noise.sample(&mut rng));
        out.push(Observation {
            pose_id,
            landmark_id: lm.id,
            range: nr.clamp(1e-6 * sensor.max_range, sensor.max_range),
            bearing: nb.clamp(-half_fov, half_fov),
        });
    }
    out
}

fn offsets(pose: &Pose2, landmark: (f64, f64)) -> Result<(f64, f64, f64)> {
    let dx = landmark.0 - pose.x;
    let dy = landmark.1 - pose.y;
    let q = dx * dx + dy * dy;
    if q.sqrt() <= 1e-9 {
        return Err(Error::Singular(
            "landmark coincides with the sensor position".into(),
        ));
    }
    Ok((dx, dy, q))
}

/// ∂(range, bearing)/∂(x, y, θ) of the pose.
pub fn observation_jacobian(pose: &Pose2, landmark: (f64, f64)) -> Result<Matrix2x3<f64>> {
    let (dx, dy, q) = offsets(pose, landmark)?;
    let r = q.sqrt();
    Ok(Matrix2x3::new(
        -dx / r, -dy / r, 0.0, //
        dy / q, -dx / q, -1.0,
    ))
}

/// ∂(range, bearing)/∂(landmark x, landmark y).
pub fn landmark_jacobian(pose: &Pose2, landmark: (f64, f64)) -> Result<Matrix2<f64>> {
    let (dx, dy, q) = offsets(pose, landmark)?;
    let r = q.sqrt();
    Ok(Matrix2::new(
        dx / r, dy / r, //
        -dy / q, dx / q,
    ))
}
