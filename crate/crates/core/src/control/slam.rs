use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{ExplorationConfig, SensorModel};
use crate::error::Result;
use crate::frontend::{build_camera_point_hessian, extract_pose_graph, observe, schur_reduce, Observation};
use crate::geometry::{Pose2, RelativePose2};
use crate::graph::{PoseGraph, VertexId};
use crate::world::{LandmarkId, World};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keyframe {
    pub id: VertexId,
    pub truth: Pose2,
    pub estimate: Pose2,
}

/// Simulated SLAM: dead-reckoned keyframe estimates, noisy landmark
/// observations and landmark estimates averaged over their projections.
#[derive(Debug, Clone)]
pub struct SlamState {
    keyframes: Vec<Keyframe>,
    observations: Vec<Observation>,
    landmark_sums: BTreeMap<LandmarkId, (f64, f64, usize)>,
    odom_rng: ChaCha8Rng,
    seed: u64,
}

pub(crate) fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SlamState {
    pub fn new(seed: u64) -> Self {
        Self {
            keyframes: Vec::new(),
            observations: Vec::new(),
            landmark_sums: BTreeMap::new(),
            odom_rng: ChaCha8Rng::seed_from_u64(mix(seed, 1)),
            seed,
        }
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn last(&self) -> Option<&Keyframe> {
        self.keyframes.last()
    }

    /// Adds a keyframe at the true pose `truth`. The estimate composes the
    /// previous estimate with the true motion corrupted by odometry noise.
    pub fn add_keyframe(&mut self, truth: Pose2, world: &World, camera: &SensorModel) -> Result<VertexId> {
        let id = self.keyframes.len();
        let estimate = match self.keyframes.last() {
            None => truth,
            Some(prev) => {
                let d = prev.truth.between(&truth);
                let mut noisy = [d.dx, d.dy, d.dtheta];
                for (v, &std) in noisy.iter_mut().zip(&camera.odom_noise_std) {
                    if std > 0.0 {
                        *v += Normal::new(0.0, std).expect("validated std").sample(&mut self.odom_rng);
                    }
                }
                prev.estimate.compose(&RelativePose2::new(noisy[0], noisy[1], noisy[2]))
            }
        };
        let obs = observe(id, &truth, world, camera, mix(self.seed, 2 + id as u64));
        for o in &obs {
            let a = estimate.theta + o.bearing;
            let entry = self.landmark_sums.entry(o.landmark_id).or_insert((0.0, 0.0, 0));
            entry.0 += estimate.x + o.range * a.cos();
            entry.1 += estimate.y + o.range * a.sin();
            entry.2 += 1;
        }
        self.observations.extend(obs);
        self.keyframes.push(Keyframe { id, truth, estimate });
        Ok(id)
    }

    /// Estimated map points, ordered by landmark id.
    pub fn map_points(&self) -> Vec<(LandmarkId, (f64, f64))> {
        self.landmark_sums
            .iter()
            .map(|(&id, &(sx, sy, n))| (id, (sx / n as f64, sy / n as f64)))
            .collect()
    }

    /// Essential pose-graph of the current keyframes, linearized at the
    /// estimates.
    pub fn graph(&self, config: &ExplorationConfig) -> Result<PoseGraph> {
        let poses: Vec<(VertexId, Pose2)> = self.keyframes.iter().map(|k| (k.id, k.estimate)).collect();
        let points = self.map_points();
        let h = build_camera_point_hessian(&poses, &points, &self.observations, &config.camera)?;
        let schur = schur_reduce(&h, config.frontend.damping)?;
        extract_pose_graph(
            &schur.reduced,
            &schur.covisibility,
            &poses,
            config.frontend.covisibility_threshold,
            config.camera.odom_noise_std,
        )
    }
}
