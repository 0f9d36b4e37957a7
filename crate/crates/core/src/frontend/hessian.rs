use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, Matrix2, Matrix2x3, Matrix3, Matrix3x2};

use super::observe::{landmark_jacobian, observation_jacobian, Observation};
use super::info_weight;
use crate::config::SensorModel;
use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::graph::VertexId;
use crate::world::LandmarkId;

/// Gauss-Newton Hessian of the joint pose/landmark least-squares problem,
/// split into pose, landmark and coupling blocks.
#[derive(Debug, Clone)]
pub struct CameraPointHessian {
    /// `(3 · poses) × (3 · poses)`.
    pub h_c: DMatrix<f64>,
    /// Diagonal 2×2 landmark blocks, one per entry of `point_ids`.
    pub h_p: Vec<Matrix2<f64>>,
    /// `(3 · poses) × (2 · points)`.
    pub h_cp: DMatrix<f64>,
    pub pose_ids: Vec<VertexId>,
    pub point_ids: Vec<LandmarkId>,
    /// Pose block indices observing each point (sorted, deduplicated).
    pub observers: Vec<Vec<usize>>,
}

impl CameraPointHessian {
    pub fn num_poses(&self) -> usize {
        self.pose_ids.len()
    }

    pub fn num_points(&self) -> usize {
        self.point_ids.len()
    }

    pub fn h_p_dense(&self) -> DMatrix<f64> {
        let m = self.num_points();
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        for (p, b) in self.h_p.iter().enumerate() {
            out.view_mut((2 * p, 2 * p), (2, 2)).copy_from(b);
        }
        out
    }

    /// The assembled `[[H_c, H_cp], [H_cpᵀ, H_p]]`.
    pub fn full_matrix(&self) -> DMatrix<f64> {
        let nc = 3 * self.num_poses();
        let np = 2 * self.num_points();
        let mut out = DMatrix::zeros(nc + np, nc + np);
        out.view_mut((0, 0), (nc, nc)).copy_from(&self.h_c);
        out.view_mut((0, nc), (nc, np)).copy_from(&self.h_cp);
        out.view_mut((nc, 0), (np, nc)).copy_from(&self.h_cp.transpose());
        out.view_mut((nc, nc), (np, np)).copy_from(&self.h_p_dense());
        out
    }

    fn coupling(&self, pose: usize, point: usize) -> Matrix3x2<f64> {
        self.h_cp.fixed_view::<3, 2>(3 * pose, 2 * point).into_owned()
    }
}

/// Accumulates `JᵀΣ⁻¹J` for every observation, linearized at the given pose
/// and landmark estimates. Landmarks without observations are left out.
pub fn build_camera_point_hessian(
    poses: &[(VertexId, Pose2)],
    points: &[(LandmarkId, (f64, f64))],
    observations: &[Observation],
    sensor: &SensorModel,
) -> Result<CameraPointHessian> {
    let pose_index: HashMap<VertexId, usize> =
        poses.iter().enumerate().map(|(i, (id, _))| (*id, i)).collect();
    let point_pos: HashMap<LandmarkId, (f64, f64)> = points.iter().copied().collect();

    let mut point_ids: Vec<LandmarkId> = Vec::new();
    let mut point_index: HashMap<LandmarkId, usize> = HashMap::new();
    for o in observations {
        if !pose_index.contains_key(&o.pose_id) {
            return Err(Error::invalid(format!("observation references unknown pose {}", o.pose_id)));
        }
        if !point_pos.contains_key(&o.landmark_id) {
            return Err(Error::invalid(format!(
                "observation references unknown landmark {}",
                o.landmark_id
            )));
        }
        point_index.entry(o.landmark_id).or_insert_with(|| {
            point_ids.push(o.landmark_id);
            point_ids.len() - 1
        });
    }

    let n = poses.len();
    let m = point_ids.len();
    let w = Matrix2::new(
        info_weight(sensor.range_noise_std),
        0.0,
        0.0,
        info_weight(sensor.bearing_noise_std),
    );
    let mut h_c = DMatrix::zeros(3 * n, 3 * n);
    let mut h_cp = DMatrix::zeros(3 * n, 2 * m);
    let mut h_p = vec![Matrix2::zeros(); m];
    let mut observers = vec![BTreeSet::new(); m];

    for o in observations {
        let i = pose_index[&o.pose_id];
        let p = point_index[&o.landmark_id];
        let pose = poses[i].1;
        let lm = point_pos[&o.landmark_id];
        let jc: Matrix2x3<f64> = observation_jacobian(&pose, lm)?;
        let jp: Matrix2<f64> = landmark_jacobian(&pose, lm)?;
        let jc_w = jc.transpose() * w;
        let cc = jc_w * jc;
        let cp = jc_w * jp;
        let pp = jp.transpose() * w * jp;
        let mut blk = h_c.fixed_view_mut::<3, 3>(3 * i, 3 * i);
        blk += cc;
        let mut blk = h_cp.fixed_view_mut::<3, 2>(3 * i, 2 * p);
        blk += cp;
        h_p[p] += pp;
        observers[p].insert(i);
    }

    Ok(CameraPointHessian {
        h_c,
        h_p,
        h_cp,
        pose_ids: poses.iter().map(|(id, _)| *id).collect(),
        point_ids,
        observers: observers.into_iter().map(|s| s.into_iter().collect()).collect(),
    })
}

/// Reduced pose Hessian after marginalizing every landmark.
#[derive(Debug, Clone)]
pub struct SchurResult {
    /// `H_c - H_cp (H_p + damping·I)⁻¹ H_cpᵀ`.
    pub reduced: DMatrix<f64>,
    /// `covisibility[i][k]`: landmarks observed from both pose blocks `i` and `k`.
    pub covisibility: Vec<Vec<usize>>,
    /// Landmarks whose damped block was singular and was left out.
    pub skipped: Vec<LandmarkId>,
}

fn invert_sym2(b: &Matrix2<f64>) -> Option<Matrix2<f64>> {
    let tr = b[(0, 0)] + b[(1, 1)];
    let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    if !(tr > 0.0) || !(det > 1e-12 * tr * tr) {
        return None;
    }
    Some(Matrix2::new(b[(1, 1)], -b[(0, 1)], -b[(1, 0)], b[(0, 0)]) / det)
}

/// Marginalizes the landmarks one 2×2 block at a time.
pub fn schur_reduce(h: &CameraPointHessian, damping: f64) -> Result<SchurResult> {
    if !(damping >= 0.0) {
        return Err(Error::invalid("damping must be nonnegative"));
    }
    let n = h.num_poses();
    let mut reduced = h.h_c.clone();
    let mut covisibility = vec![vec![0usize; n]; n];
    let mut skipped = Vec::new();
    for (p, obs) in h.observers.iter().enumerate() {
        for &i in obs {
            for &k in obs {
                covisibility[i][k] += 1;
            }
        }
        let damped = h.h_p[p] + Matrix2::identity() * damping;
        let Some(inv) = invert_sym2(&damped) else {
            skipped.push(h.point_ids[p]);
            continue;
        };
        let scaled: Vec<Matrix3x2<f64>> = obs.iter().map(|&i| h.coupling(i, p) * inv).collect();
        for (a, &i) in obs.iter().enumerate() {
            for &k in obs {
                let update: Matrix3<f64> = scaled[a] * h.coupling(k, p).transpose();
                let mut blk = reduced.fixed_view_mut::<3, 3>(3 * i, 3 * k);
                blk -= update;
            }
        }
    }
    Ok(SchurResult {
        reduced,
        covisibility,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_schur_complement;
    use nalgebra::Matrix2;

    fn sensor() -> SensorModel {
        SensorModel {
            range_noise_std: 0.1,
            bearing_noise_std: 0.05,
            ..SensorModel::default()
        }
    }

    fn obs(pose_id: usize, landmark_id: usize) -> Observation {
        Observation { pose_id, landmark_id, range: 1.0, bearing: 0.0 }
    }

    #[test]
    fn single_observation_blocks() {
        let pose = Pose2::new(0.5, -0.2, 0.3);
        let lm = (2.0, 1.0);
        let h = build_camera_point_hessian(&[(0, pose)], &[(9, lm)], &[obs(0, 9)], &sensor()).unwrap();
        let w = Matrix2::new(100.0, 0.0, 0.0, 400.0);
        let jc = observation_jacobian(&pose, lm).unwrap();
        let jp = landmark_jacobian(&pose, lm).unwrap();
        assert!((h.h_c.fixed_view::<3, 3>(0, 0) - jc.transpose() * w * jc).abs().max() < 1e-9);
        assert!((h.h_p[0] - jp.transpose() * w * jp).abs().max() < 1e-9);
        assert!((h.h_cp.fixed_view::<3, 2>(0, 0) - jc.transpose() * w * jp).abs().max() < 1e-9);
    }

    #[test]
    fn unknown_references_rejected() {
        let poses = [(0, Pose2::identity())];
        let pts = [(1, (1.0, 0.0))];
        assert!(build_camera_point_hessian(&poses, &pts, &[obs(5, 1)], &sensor()).is_err());
        assert!(build_camera_point_hessian(&poses, &pts, &[obs(0, 2)], &sensor()).is_err());
    }

    #[test]
    fn unobserved_points_absent() {
        let poses = [(0, Pose2::identity())];
        let pts = [(1, (1.0, 0.0)), (2, (0.0, 1.0))];
        let h = build_camera_point_hessian(&poses, &pts, &[obs(0, 2)], &sensor()).unwrap();
        assert_eq!(h.point_ids, vec![2]);
        assert_eq!(h.h_p.len(), 1);
    }

    #[test]
    fn disjoint_landmarks_keep_pose_blocks_apart() {
        let poses = [(0, Pose2::identity()), (1, Pose2::new(1.0, 0.0, 0.0))];
        let pts = [(1, (2.0, 1.0)), (2, (3.0, -1.0))];
        let h = build_camera_point_hessian(&poses, &pts, &[obs(0, 1), obs(1, 2)], &sensor()).unwrap();
        assert!(h.h_c.view((0, 3), (3, 3)).iter().all(|v| *v == 0.0));
        let s = schur_reduce(&h, 0.0).unwrap();
        assert!(s.reduced.view((0, 3), (3, 3)).iter().all(|v| *v == 0.0));
        assert_eq!(s.covisibility[0][1], 0);
    }

    #[test]
    fn decoupled_schur_is_identity_map() {
        let h = CameraPointHessian {
            h_c: DMatrix::identity(6, 6) * 3.0,
            h_p: vec![Matrix2::identity()],
            h_cp: DMatrix::zeros(6, 2),
            pose_ids: vec![0, 1],
            point_ids: vec![0],
            observers: vec![vec![0, 1]],
        };
        let s = schur_reduce(&h, 0.0).unwrap();
        assert_eq!(s.reduced, h.h_c);
    }

    #[test]
    fn two_poses_one_shared_landmark_matches_dense() {
        let poses = [(0, Pose2::new(0.0, 0.0, 0.1)), (1, Pose2::new(1.0, 0.2, -0.2))];
        let pts = [(4, (2.5, 1.5))];
        let h = build_camera_point_hessian(&poses, &pts, &[obs(0, 4), obs(1, 4)], &sensor()).unwrap();
        let s = schur_reduce(&h, 0.0).unwrap();
        let dense = dense_schur_complement(&h.full_matrix(), 6).unwrap();
        assert!((&s.reduced - &dense).abs().max() < 1e-9 * dense.abs().max().max(1.0));
        assert_eq!(s.covisibility[0][1], 1);
        assert!(s.skipped.is_empty());
    }

    #[test]
    fn singular_block_reported() {
        let h = CameraPointHessian {
            h_c: DMatrix::identity(3, 3),
            h_p: vec![Matrix2::new(1.0, 0.0, 0.0, 0.0)],
            h_cp: DMatrix::zeros(3, 2),
            pose_ids: vec![0],
            point_ids: vec![17],
            observers: vec![vec![0]],
        };
        assert_eq!(schur_reduce(&h, 0.0).unwrap().skipped, vec![17]);
        assert!(schur_reduce(&h, 1e-3).unwrap().skipped.is_empty());
    }
}
