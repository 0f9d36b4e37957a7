use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SensorModel;
use crate::error::{Error, Result};
use crate::frontend::{build_camera_point_hessian, landmark_jacobian, observation_jacobian, schur_reduce};
use crate::frontend::{CameraPointHessian, Observation};
use crate::geometry::Pose2;
use crate::graph::{EdgeKind, PoseGraph, WeightedPoseGraph};
use crate::info::InfoMatrix;
use crate::optimality::log_tree_weight;

use super::{dense_log_abs_det, enumerate_tree_weight, finite_difference_jacobian, ranking_suite};

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 4] = ["trees", "schur", "jacobian", "ranking"];

/// One line of an oracle report.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: usize,
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub elapsed_s: f64,
    pub details: Vec<String>,
}

/// A random connected weighted graph: a random spanning tree plus extra
/// distinct edges, weights in `[0.1, 10)`.
pub fn random_connected_graph(rng: &mut impl Rng, vertices: usize, extra_edges: usize) -> WeightedPoseGraph {
    let mut g = PoseGraph::new();
    for i in 0..vertices {
        g.add_vertex(i, Pose2::new(i as f64, 0.0, 0.0)).expect("fresh ids");
    }
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let mut weights = Vec::new();
    for k in 1..vertices {
        let parent = order[rng.random_range(0..k)];
        g.connect(parent, order[k], EdgeKind::Odometry, InfoMatrix::identity()).expect("tree edge");
        weights.push(rng.random_range(0.1..10.0));
    }
    let mut pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|a| ((a + 1)..vertices).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    for (a, b) in pairs.into_iter().take(extra_edges) {
        g.connect(a, b, EdgeKind::LoopClosure, InfoMatrix::identity()).expect("distinct pair");
        weights.push(rng.random_range(0.1..10.0));
    }
    WeightedPoseGraph::new(g, weights).expect("valid weights")
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `log_tree_weight` against exhaustive spanning-tree enumeration.
pub fn trees_suite(cases: usize, seed: u64) -> Result<SuiteOutcome> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(2..=6);
        let extra = rng.random_range(0..=4);
        let g = random_connected_graph(&mut rng, n, extra);
        let fast = log_tree_weight(&g)?.exp();
        let slow = enumerate_tree_weight(&g);
        worst = worst.max(relative(fast, slow));
    }
    let tolerance = 1e-7;
    Ok(SuiteOutcome {
        name: "trees".into(),
        cases,
        metric: "max relative error".into(),
        value: worst,
        tolerance,
        passed: worst <= tolerance,
        elapsed_s: t0.elapsed().as_secs_f64(),
        details: vec![],
    })
}

/// A random camera-point Hessian with up to 6 poses and 25 points, with a
/// unit prior on every pose so the full matrix is nonsingular.
pub fn random_scene_hessian(rng: &mut impl Rng) -> Result<CameraPointHessian> {
    let n_poses = rng.random_range(2..=6);
    let n_points = rng.random_range(1..=25);
    let poses: Vec<(usize, Pose2)> = (0..n_poses)
        .map(|i| (i, Pose2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.1..3.1))))
        .collect();
    let mut points = Vec::new();
    let mut observations = Vec::new();
    for id in 0..n_points {
        let p = loop {
            let p = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            if poses.iter().all(|(_, q)| (q.x - p.0).hypot(q.y - p.1) > 0.3) {
                break p;
            }
        };
        points.push((id, p));
        let mut observers: Vec<usize> = (0..n_poses).collect();
        observers.shuffle(rng);
        let k = rng.random_range(1..=n_poses);
        for &pose_id in &observers[..k] {
            observations.push(Observation { pose_id, landmark_id: id, range: 0.0, bearing: 0.0 });
        }
    }
    let mut h = build_camera_point_hessian(&poses, &points, &observations, &SensorModel::default())?;
    h.h_c += DMatrix::identity(3 * n_poses, 3 * n_poses);
    Ok(h)
}

/// `det(H_full) = det(H_p) · det(H_c')` on random scenes, compared in the
/// log domain.
pub fn schur_suite(cases: usize, seed: u64) -> Result<SuiteOutcome> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let h = random_scene_hessian(&mut rng)?;
        let reduced = schur_reduce(&h, 0.0)?;
        if !reduced.skipped.is_empty() {
            return Err(Error::Singular("random scene produced a singular landmark block".into()));
        }
        let full = dense_log_abs_det(&h.full_matrix());
        let log_hp: f64 = h.h_p.iter().map(|b| b.determinant().abs().ln()).sum();
        let split = log_hp + dense_log_abs_det(&reduced.reduced);
        worst = worst.max((full - split).exp_m1().abs());
    }
    let tolerance = 1e-6;
    Ok(SuiteOutcome {
        name: "schur".into(),
        cases,
        metric: "max relative determinant error".into(),
        value: worst,
        tolerance,
        passed: worst <= tolerance,
        elapsed_s: t0.elapsed().as_secs_f64(),
        details: vec![],
    })
}

/// Analytic observation Jacobians against central differences.
pub fn jacobian_suite(cases: usize, seed: u64) -> Result<SuiteOutcome> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let pose = Pose2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-3.0..3.0));
        let r = rng.random_range(0.3..5.0);
        let a: f64 = rng.random_range(-3.0..3.0);
        let lm = (pose.x + r * a.cos(), pose.y + r * a.sin());
        let jp = observation_jacobian(&pose, lm)?;
        let jl = landmark_jacobian(&pose, lm)?;
        let (fp, fl) = finite_difference_jacobian(&pose, lm, 1e-6);
        worst = worst.max((jp - fp).abs().max()).max((jl - fl).abs().max());
    }
    let tolerance = 1e-5;
    Ok(SuiteOutcome {
        name: "jacobian".into(),
        cases,
        metric: "max absolute error".into(),
        value: worst,
        tolerance,
        passed: worst <= tolerance,
        elapsed_s: t0.elapsed().as_secs_f64(),
        details: vec![],
    })
}

/// Runs a named suite at its standard size.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<SuiteOutcome>> {
    match name {
        "trees" => Ok(vec![trees_suite(200, seed)?]),
        "schur" => Ok(vec![schur_suite(50, seed)?]),
        "jacobian" => Ok(vec![jacobian_suite(1000, seed)?]),
        "ranking" => {
            let t0 = Instant::now();
            let report = ranking_suite(30, seed)?;
            let elapsed_s = t0.elapsed().as_secs_f64();
            let details = report
                .scenarios
                .iter()
                .enumerate()
                .map(|(i, s)| format!("scenario {i:2}: {} candidates, spearman {:.4}", s.utilities.len(), s.spearman()))
                .collect();
            let median = report.median_spearman();
            let top1 = report.top1_rate();
            Ok(vec![
                SuiteOutcome {
                    name: "ranking".into(),
                    cases: report.scenarios.len(),
                    metric: "median spearman (min)".into(),
                    value: median,
                    tolerance: 0.8,
                    passed: median >= 0.8,
                    elapsed_s,
                    details,
                },
                SuiteOutcome {
                    name: "ranking".into(),
                    cases: report.scenarios.len(),
                    metric: "top-1 agreement (min)".into(),
                    value: top1,
                    tolerance: 0.7,
                    passed: top1 >= 0.7,
                    elapsed_s: 0.0,
                    details: vec![],
                },
            ])
        }
        other => Err(Error::invalid(format!("unknown oracle suite '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        assert!(trees_suite(20, 1).unwrap().passed);
        assert!(schur_suite(5, 1).unwrap().passed);
        assert!(jacobian_suite(50, 1).unwrap().passed);
        assert!(run_suite("bogus", 0).is_err());
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let g = random_connected_graph(&mut rng, 5, 3);
            assert!(g.base().is_connected());
            assert_eq!(g.base().num_edges(), 7);
        }
    }
}
