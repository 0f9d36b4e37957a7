//! Simulated SLAM frontend.
//!
//! A planar range-bearing sensor observes world landmarks. Observations are
//! linearized into the camera-point Hessian, landmarks are marginalized with
//! a Schur complement, and the reduced pose Hessian is sparsified into an
//! essential pose-graph.

mod extract;
mod hessian;
mod observe;

pub use extract::{extract_pose_graph, odometry_information};
pub use hessian::{build_camera_point_hessian, schur_reduce, CameraPointHessian, SchurResult};
pub use observe::{
    landmark_jacobian, observation_jacobian, observe, predict_measurement, Observation,
};

/// Noise standard deviations are floored at this value when converted to
/// information weights.
pub const MIN_NOISE_STD: f64 = 1e-6;

pub(crate) fn info_weight(std: f64) -> f64 {
    1.0 / std.max(MIN_NOISE_STD).powi(2)
}
