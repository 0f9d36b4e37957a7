use nalgebra::{Matrix2, Matrix3};

use crate::config::SensorModel;
use crate::error::{Error, Result};
use crate::frontend::{info_weight, observation_jacobian};
use crate::geometry::Pose2;
use crate::graph::{EdgeKind, PoseGraph};
use crate::info::InfoMatrix;

/// Information of the most recent odometry edge, i.e. the one whose target
/// vertex was added last. Predicted odometry edges reuse it.
pub fn odom_edge_hessian(slam: &PoseGraph) -> Result<InfoMatrix> {
    slam.edges()
        .iter()
        .filter(|e| e.kind == EdgeKind::Odometry)
        .max_by_key(|e| slam.index_of(e.to))
        .map(|e| e.info)
        .ok_or_else(|| Error::invalid("SLAM graph has no odometry edge"))
}

/// Expected information of a loop closure observed from `pose`:
/// `p_lc · Σ JᵢᵀΣ⁻¹Jᵢ` over the shared points.
pub fn lc_edge_hessian(
    pose: &Pose2,
    points: &[(f64, f64)],
    p_lc: f64,
    sensor: &SensorModel,
) -> Result<InfoMatrix> {
    if points.is_empty() {
        return Err(Error::invalid("loop closure needs at least one covisible point"));
    }
    if !(p_lc > 0.0 && p_lc <= 1.0) {
        return Err(Error::invalid("loop-closure probability must lie in (0, 1]"));
    }
    let w = Matrix2::new(
        info_weight(sensor.range_noise_std),
        0.0,
        0.0,
        info_weight(sensor.bearing_noise_std),
    );
    let mut h = Matrix3::zeros();
    for &p in points {
        let j = observation_jacobian(pose, p)?;
        h += j.transpose() * w * j;
    }
    h *= p_lc;
    Ok(InfoMatrix::project_psd(&(0.5 * (h + h.transpose()))))
}
