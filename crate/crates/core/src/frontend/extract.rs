use nalgebra::{DMatrix, Matrix3};

use super::info_weight;
use crate::error::{Error, Result};
use crate::geometry::Pose2;
use crate::graph::{EdgeKind, PoseGraph, VertexId};
use crate::info::InfoMatrix;

/// Odometry information between consecutive poses expressed in world-frame
/// coordinates: `JᵀΣ⁻¹J` with `J = ∂ between(from, to) / ∂ to`.
pub fn odometry_information(from: &Pose2, odom_noise_std: [f64; 3]) -> InfoMatrix {
    let (s, c) = from.theta.sin_cos();
    let wx = info_weight(odom_noise_std[0]);
    let wy = info_weight(odom_noise_std[1]);
    let wt = info_weight(odom_noise_std[2]);
    // J = [[c, s, 0], [-s, c, 0], [0, 0, 1]]
    let m = Matrix3::new(
        c * c * wx + s * s * wy,
        c * s * (wx - wy),
        0.0,
        c * s * (wx - wy),
        s * s * wx + c * c * wy,
        0.0,
        0.0,
        0.0,
        wt,
    );
    InfoMatrix::project_psd(&m)
}

/// Sparsifies a reduced pose Hessian into an essential pose-graph.
///
/// Pose `i` and `k > i` are joined iff they share at least
/// `covisibility_threshold` landmarks or `k = i + 1`. The edge information is
/// the negated off-diagonal block `-H[i, k]`, symmetrized and clamped to
/// PSD; consecutive (odometry) edges also add the odometry information.
pub fn extract_pose_graph(
    reduced: &DMatrix<f64>,
    covisibility: &[Vec<usize>],
    poses: &[(VertexId, Pose2)],
    covisibility_threshold: usize,
    odom_noise_std: [f64; 3],
) -> Result<PoseGraph> {
    if covisibility_threshold == 0 {
        return Err(Error::invalid("covisibility threshold must be at least 1"));
    }
    let n = poses.len();
    if reduced.nrows() != 3 * n || reduced.ncols() != 3 * n || covisibility.len() != n {
        return Err(Error::invalid("reduced Hessian does not match the pose list"));
    }
    let mut g = PoseGraph::new();
    for &(id, pose) in poses {
        g.add_vertex(id, pose)?;
    }
    for i in 0..n {
        for k in (i + 1)..n {
            let consecutive = k == i + 1;
            if !consecutive && covisibility[i][k] < covisibility_threshold {
                continue;
            }
            let block: Matrix3<f64> = -reduced.fixed_view::<3, 3>(3 * i, 3 * k).into_owned();
            let mut info = InfoMatrix::project_psd(&block);
            let kind = if consecutive {
                info = info.add(&odometry_information(&poses[i].1, odom_noise_std));
                EdgeKind::Odometry
            } else {
                EdgeKind::LoopClosure
            };
            g.connect(poses[i].0, poses[k].0, kind, info)?;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poses(n: usize) -> Vec<(VertexId, Pose2)> {
        (0..n).map(|i| (i, Pose2::new(i as f64, 0.0, 0.0))).collect()
    }

    #[test]
    fn prunes_weak_covisibility() {
        let p = poses(3);
        let mut covis = vec![vec![0; 3]; 3];
        covis[0][2] = 2;
        covis[2][0] = 2;
        let h = DMatrix::identity(9, 9);
        let g = extract_pose_graph(&h, &covis, &p, 3, [0.1; 3]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert!(!g.has_edge(0, 2, EdgeKind::LoopClosure));
        let g = extract_pose_graph(&h, &covis, &p, 2, [0.1; 3]).unwrap();
        assert!(g.has_edge(0, 2, EdgeKind::LoopClosure));
    }

    #[test]
    fn threshold_one_full_covisibility_is_complete() {
        let p = poses(5);
        let covis = vec![vec![4; 5]; 5];
        let g = extract_pose_graph(&DMatrix::identity(15, 15), &covis, &p, 1, [0.1; 3]).unwrap();
        assert_eq!(g.num_edges(), 10);
    }

    #[test]
    fn odometry_information_rotates() {
        let a = odometry_information(&Pose2::new(0.0, 0.0, 0.0), [0.1, 0.2, 0.05]);
        assert!((a.matrix()[(0, 0)] - 100.0).abs() < 1e-9);
        assert!((a.matrix()[(1, 1)] - 25.0).abs() < 1e-9);
        let b = odometry_information(
            &Pose2::new(0.0, 0.0, std::f64::consts::FRAC_PI_2),
            [0.1, 0.2, 0.05],
        );
        assert!((b.matrix()[(0, 0)] - 25.0).abs() < 1e-9);
        assert!((b.matrix()[(2, 2)] - 400.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let p = poses(2);
        assert!(extract_pose_graph(&DMatrix::identity(3, 3), &vec![vec![0; 2]; 2], &p, 1, [0.1; 3]).is_err());
        assert!(extract_pose_graph(&DMatrix::identity(6, 6), &vec![vec![0; 2]; 2], &p, 0, [0.1; 3]).is_err());
    }
}
