use super::*;
use crate::geometry::Pose2;
use crate::grid::{Cell, CellIndex};
use crate::optimality::{dopt_graph, dopt_info};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn known_grid() -> OccupancyGrid {
    let mut g = OccupancyGrid::new(0.1, 0.0, 0.0, 100, 60).unwrap();
    for i in 0..g.len() {
        let c = g.unflat(i);
        g.set(c, Cell::Free);
    }
    g
}

fn slam_chain(n: usize) -> PoseGraph {
    let mut g = PoseGraph::new();
    for i in 0..n {
        g.add_vertex(i, Pose2::new(1.0 + i as f64, 3.0, 0.0)).unwrap();
    }
    for i in 1..n {
        let info = InfoMatrix::from_diagonal([10.0 + i as f64, 10.0, 20.0]).unwrap();
        g.connect(i - 1, i, EdgeKind::Odometry, info).unwrap();
    }
    g
}

fn cluster(cx: f64, cy: f64, n: usize) -> Vec<(LandmarkId, (f64, f64))> {
    (0..n)
        .map(|i| {
            let a = i as f64 * TAU / n as f64;
            (100 + i, (cx + 0.3 * a.cos(), cy + 0.3 * a.sin()))
        })
        .collect()
}

fn params() -> LoopClosureParams {
    LoopClosureParams::new(3, 6).unwrap()
}

#[test]
fn lc_probability_branches() {
    let p = params();
    assert_eq!(lc_probability(2, &p), 0.0);
    assert!((lc_probability(4, &p) - 4.0 / 6.0).abs() < 1e-15);
    assert_eq!(lc_probability(6, &p), 1.0);
    assert_eq!(lc_probability(7, &p), 1.0);
}

#[test]
fn covisible_frustum_and_occlusion() {
    let mut grid = known_grid();
    let sensor = SensorModel::ideal(TAU / 3.0, 5.0);
    let pose = Pose2::new(2.0, 3.0, 0.0);
    let pts = vec![(1, (3.0, 3.0)), (2, (1.0, 3.0)), (3, (6.0, 3.4)), (4, (8.0, 3.0))];
    assert_eq!(expected_covisible(&pose, &pts, &sensor, &grid), vec![1, 3]);
    for row in 0..60 {
        grid.set(CellIndex::new(45, row), Cell::Occupied);
    }
    assert_eq!(expected_covisible(&pose, &pts, &sensor, &grid), vec![1]);
    let wide = SensorModel::ideal(TAU, 5.0);
    let empty = known_grid();
    assert_eq!(expected_covisible(&pose, &pts, &wide, &empty), vec![1, 2, 3]);
}

#[test]
fn odom_hessian_is_latest_odometry_edge() {
    let mut g = slam_chain(4);
    let last = g.edges().last().unwrap().info;
    assert_eq!(odom_edge_hessian(&g).unwrap(), last);
    g.connect(0, 3, EdgeKind::LoopClosure, InfoMatrix::identity()).unwrap();
    assert_eq!(odom_edge_hessian(&g).unwrap(), last);
    let mut lone = PoseGraph::new();
    lone.add_vertex(0, Pose2::identity()).unwrap();
    assert!(odom_edge_hessian(&lone).is_err());
}

#[test]
fn lc_hessian_properties() {
    let sensor = SensorModel::default();
    let pose = Pose2::new(0.0, 0.0, 0.3);
    let pt = (2.0, 1.0);
    let j = crate::frontend::observation_jacobian(&pose, pt).unwrap();
    let w = nalgebra::Matrix2::new(1.0 / 0.05f64.powi(2), 0.0, 0.0, 1.0 / 0.01f64.powi(2));
    let expected = j.transpose() * w * j;
    let h = lc_edge_hessian(&pose, &[pt], 1.0, &sensor).unwrap();
    assert!((h.matrix() - expected).abs().max() < 1e-9 * expected.abs().max());
    let half = lc_edge_hessian(&pose, &[pt, (1.0, -1.0)], 0.5, &sensor).unwrap();
    let full = lc_edge_hessian(&pose, &[pt, (1.0, -1.0)], 1.0, &sensor).unwrap();
    assert!((half.matrix() * 2.0 - full.matrix()).abs().max() < 1e-9 * full.matrix().abs().max());
    assert!(lc_edge_hessian(&pose, &[], 1.0, &sensor).is_err());

    let near: Vec<(f64, f64)> = (0..8).map(|i| (1.0, -0.7 + 0.2 * i as f64)).collect();
    let far: Vec<(f64, f64)> = (0..3).map(|i| (4.5, -0.5 + 0.5 * i as f64)).collect();
    let h_near = lc_edge_hessian(&pose, &near, 1.0, &sensor).unwrap();
    let h_far = lc_edge_hessian(&pose, &far, 1.0, &sensor).unwrap();
    assert!(dopt_info(&h_far) < dopt_info(&h_near));
}

#[test]
fn novelty_fixtures() {
    let grid = known_grid();
    let pose = Pose2::new(5.0, 3.0, 0.0);
    assert_eq!(novelty_sigma(&pose, &grid, 1.5).unwrap(), 0.0);
    let unknown = OccupancyGrid::new(0.1, 0.0, 0.0, 100, 60).unwrap();
    assert_eq!(novelty_sigma(&pose, &unknown, 1.5).unwrap(), 1.0);
    let mut half = known_grid();
    for row in 0..60 {
        for col in 50..100 {
            half.set(CellIndex::new(col, row), Cell::Unknown);
        }
    }
    let s = novelty_sigma(&pose, &half, 1.5).unwrap();
    assert!((s - 0.5).abs() < 0.05, "{s}");
    let edge = novelty_sigma(&Pose2::new(0.0, 3.0, 0.0), &grid, 1.0).unwrap();
    assert!((edge - 0.5).abs() < 0.05);
}

#[test]
fn novelty_scaling_examples() {
    let i3 = InfoMatrix::identity();
    assert_eq!(apply_novelty(&i3, 0.0), i3);
    assert_eq!(apply_novelty(&i3, 1.0), i3.scaled(2.0));
    let d2 = InfoMatrix::from_diagonal([2.0, 2.0, 2.0]).unwrap();
    assert_eq!(apply_novelty(&d2, 0.5), InfoMatrix::from_diagonal([3.0, 3.0, 3.0]).unwrap());
}

#[test]
fn pure_chain_without_points() {
    let slam = slam_chain(3);
    let branch: Vec<Pose2> = (0..4).map(|i| Pose2::new(4.0 + i as f64, 3.0, 0.0)).collect();
    let hg = hallucinate_graph(&slam, &branch, &[], &SensorModel::default(), &known_grid(), params()).unwrap();
    assert_eq!(hg.graph.num_vertices(), 7);
    assert_eq!(hg.graph.num_edges(), slam.num_edges() + 4);
    assert!(hg.predicted_lc_edges.is_empty());
    assert_eq!(hg.branch_vertex_ids, (0..4).map(|k| HALLUCINATED_ID_OFFSET + k).collect::<Vec<_>>());
    assert!(hg.graph.has_edge(2, HALLUCINATED_ID_OFFSET, EdgeKind::Odometry));
}

#[test]
fn returning_branch_predicts_closure() {
    let slam = slam_chain(3);
    let pts = cluster(3.5, 3.0, 8);
    let sensor = SensorModel::default();
    let branch = vec![Pose2::new(5.0, 4.0, -2.5), Pose2::new(1.5, 3.0, 0.0)];
    let hg = hallucinate_graph(&slam, &branch, &pts, &sensor, &known_grid(), params()).unwrap();
    let last = *hg.branch_vertex_ids.last().unwrap();
    assert!(hg
        .predicted_lc_edges
        .iter()
        .any(|lc| lc.existing == 0 && lc.branch == last && lc.p_lc == 1.0 && lc.n_p == 8));
    for lc in &hg.predicted_lc_edges {
        assert!(lc.p_lc > 0.0 && lc.p_lc <= 1.0 && lc.n_p >= 3);
        assert!(hg.graph.has_edge(lc.existing, lc.branch, EdgeKind::LoopClosure));
    }
}

#[test]
fn branch_into_unseen_area_has_no_closure() {
    let slam = slam_chain(3);
    let pts = cluster(2.0, 1.0, 8);
    let branch = vec![Pose2::new(5.0, 3.0, 0.0), Pose2::new(6.0, 3.0, 0.0)];
    let hg = hallucinate_graph(&slam, &branch, &pts, &SensorModel::default(), &known_grid(), params()).unwrap();
    assert!(hg.predicted_lc_edges.is_empty());
}

#[test]
fn empty_slam_rejected() {
    let err = hallucinate_graph(&PoseGraph::new(), &[], &[], &SensorModel::default(), &known_grid(), params());
    assert!(err.is_err());
}

#[test]
fn weights_follow_novelty() {
    let slam = slam_chain(3);
    let branch: Vec<Pose2> = (0..3).map(|i| Pose2::new(4.0 + i as f64, 3.0, 0.0)).collect();
    let sensor = SensorModel::default();
    let novelty = NoveltyParams { radius: 1.5 };
    let known = known_grid();
    let hg = hallucinate_graph(&slam, &branch, &[], &sensor, &known, params()).unwrap();
    let wk = weight_graph(&hg, &known, &novelty).unwrap();
    let branch_w: Vec<f64> = wk.weights()[hg.slam_edge_count..].to_vec();
    assert!(branch_w.windows(2).all(|w| w[0] == w[1]));
    for (e, w) in wk.weighted_edges().take(hg.slam_edge_count) {
        assert_eq!(w, dopt_info(&e.info));
    }

    let mut partial = known_grid();
    for row in 0..60 {
        for col in 50..100 {
            partial.set(CellIndex::new(col, row), Cell::Unknown);
        }
    }
    let hu = hallucinate_graph(&slam, &branch, &[], &sensor, &partial, params()).unwrap();
    let wu = weight_graph(&hu, &partial, &novelty).unwrap();
    for (a, b) in wu.weights()[hu.slam_edge_count..].iter().zip(&branch_w) {
        assert!(a > b);
    }
    assert!(dopt_graph(&wu).unwrap() > dopt_graph(&wk).unwrap());
}

#[test]
fn closure_raises_graph_utility() {
    let slam = slam_chain(3);
    let sensor = SensorModel::default();
    let grid = known_grid();
    let novelty = NoveltyParams { radius: 1.5 };
    let branch = vec![Pose2::new(5.0, 4.0, -2.5), Pose2::new(1.5, 3.0, 0.0)];
    let with = hallucinate_graph(&slam, &branch, &cluster(3.5, 3.0, 8), &sensor, &grid, params()).unwrap();
    let without = hallucinate_graph(&slam, &branch, &[], &sensor, &grid, params()).unwrap();
    assert!(!with.predicted_lc_edges.is_empty());
    let u_with = dopt_graph(&weight_graph(&with, &grid, &novelty).unwrap()).unwrap();
    let u_without = dopt_graph(&weight_graph(&without, &grid, &novelty).unwrap()).unwrap();
    assert!(u_with > u_without);
}

#[test]
fn hallucination_is_deterministic() {
    let slam = slam_chain(4);
    let pts = cluster(3.0, 3.5, 10);
    let branch = vec![Pose2::new(5.0, 4.0, 3.0), Pose2::new(3.0, 4.0, 3.0)];
    let a = hallucinate_graph(&slam, &branch, &pts, &SensorModel::default(), &known_grid(), params()).unwrap();
    let b = hallucinate_graph(&slam, &branch, &pts, &SensorModel::default(), &known_grid(), params()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn lc_probability_monotone_and_bounded(a in 0usize..20, b in 0usize..20, lo in 1usize..5, extra in 0usize..5) {
        let p = LoopClosureParams::new(lo, lo + extra).unwrap();
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let (px, py) = (lc_probability(x, &p), lc_probability(y, &p));
        prop_assert!(px <= py);
        prop_assert!((0.0..=1.0).contains(&px));
    }

    #[test]
    fn novelty_scales_dopt(d in prop::array::uniform3(0.1f64..50.0), r in -1.0f64..1.0, sigma in 0.0f64..=1.0) {
        let m = nalgebra::Matrix3::new(d[0], r, 0.0, r, d[1] + 2.0, 0.0, 0.0, 0.0, d[2]);
        let h = InfoMatrix::new(m).unwrap();
        let scaled = apply_novelty(&h, sigma);
        prop_assert!(scaled.eigenvalues().iter().all(|&e| e >= -1e-9));
        let expected = (1.0 + sigma) * dopt_info(&h);
        prop_assert!((dopt_info(&scaled) - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn weights_finite_and_nonnegative(
        xs in prop::collection::vec((0.5f64..9.5, 0.5f64..5.5, -3.0f64..3.0), 1..6),
        seed_pts in prop::collection::vec((0.5f64..9.5, 0.5f64..5.5), 0..20),
    ) {
        let slam = slam_chain(4);
        let branch: Vec<Pose2> = xs.iter().map(|&(x, y, t)| Pose2::new(x, y, t)).collect();
        let pts: Vec<(LandmarkId, (f64, f64))> = seed_pts.into_iter().enumerate().collect();
        let grid = known_grid();
        let hg = hallucinate_graph(&slam, &branch, &pts, &SensorModel::default(), &grid, params()).unwrap();
        prop_assert_eq!(hg.graph.num_vertices(), 4 + branch.len());
        prop_assert!(hg.graph.num_edges() >= slam.num_edges() + branch.len());
        let wg = weight_graph(&hg, &grid, &NoveltyParams { radius: 1.5 }).unwrap();
        prop_assert!(wg.weights().iter().all(|w| w.is_finite() && *w >= 0.0));
    }
}
