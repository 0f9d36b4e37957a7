//! Independent reference computations used to validate the fast paths:
//! exhaustive spanning-tree enumeration, dense Schur complements, central
//! finite differences, and rank correlation.

mod ranking;
mod suites;

pub use ranking::{ranking_scenario, ranking_suite, RankingReport, RankingScenario};
pub use suites::{
    jacobian_suite, random_connected_graph, random_scene_hessian, run_suite, schur_suite, trees_suite, SuiteOutcome, SUITES,
};

use nalgebra::{DMatrix, Matrix2, Matrix2x3, SymmetricEigen};

use crate::frontend::predict_measurement;
use crate::geometry::{normalize_angle, Pose2};
use crate::graph::WeightedPoseGraph;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Weighted number of spanning trees by enumerating every `(|V| - 1)`-edge
/// subset. Parallel edges count as distinct edges. Exponential: keep the
/// edge count small.
pub fn enumerate_tree_weight(g: &WeightedPoseGraph) -> f64 {
    let base = g.base();
    let n = base.num_vertices();
    if n < 2 {
        return 1.0;
    }
    let edges: Vec<(usize, usize, f64)> = g
        .weighted_edges()
        .map(|(e, w)| (base.index_of(e.from).unwrap(), base.index_of(e.to).unwrap(), w))
        .collect();
    let need = n - 1;
    let mut total = 0.0;
    let mut chosen = Vec::with_capacity(need);
    fn recurse(
        start: usize,
        need: usize,
        n: usize,
        edges: &[(usize, usize, f64)],
        chosen: &mut Vec<usize>,
        total: &mut f64,
    ) {
        if chosen.len() == need {
            let mut parent: Vec<usize> = (0..n).collect();
            let mut product = 1.0;
            for &j in chosen.iter() {
                let (a, b, w) = edges[j];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    return;
                }
                parent[ra] = rb;
                product *= w;
            }
            *total += product;
            return;
        }
        let remaining = need - chosen.len();
        for j in start..edges.len() {
            if edges.len() - j < remaining {
                break;
            }
            chosen.push(j);
            recurse(j + 1, need, n, edges, chosen, total);
            chosen.pop();
        }
    }
    recurse(0, need, n, &edges, &mut chosen, &mut total);
    total
}

/// Product of the Laplacian eigenvalues after dropping the smallest one.
pub fn laplacian_nonzero_eigen_product(laplacian: &DMatrix<f64>) -> f64 {
    let mut eig: Vec<f64> = SymmetricEigen::new(laplacian.clone()).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig.iter().skip(1).product()
}

/// `A - B D⁻¹ Bᵀ` for the leading `split × split` block `A` of a dense
/// symmetric matrix, using a full inverse of the trailing block `D`.
pub fn dense_schur_complement(full: &DMatrix<f64>, split: usize) -> Option<DMatrix<f64>> {
    let n = full.nrows();
    let a = full.view((0, 0), (split, split)).into_owned();
    let b = full.view((0, split), (split, n - split)).into_owned();
    let d = full.view((split, split), (n - split, n - split)).into_owned();
    let d_inv = d.try_inverse()?;
    Some(a - &b * d_inv * b.transpose())
}

/// Log-absolute-determinant through an LU factorization.
pub fn dense_log_abs_det(m: &DMatrix<f64>) -> f64 {
    let lu = m.clone().lu();
    let u = lu.u();
    (0..m.nrows()).map(|i| u[(i, i)].abs().ln()).sum()
}

/// Central finite-difference Jacobians of `(range, bearing)` with respect to
/// the pose and to the landmark.
pub fn finite_difference_jacobian(
    pose: &Pose2,
    landmark: (f64, f64),
    step: f64,
) -> (Matrix2x3<f64>, Matrix2<f64>) {
    let eval = |p: &Pose2, l: (f64, f64)| predict_measurement(p, l);
    let diff = |plus: (f64, f64), minus: (f64, f64)| {
        (
            (plus.0 - minus.0) / (2.0 * step),
            normalize_angle(plus.1 - minus.1) / (2.0 * step),
        )
    };
    let mut jp = Matrix2x3::zeros();
    for d in 0..3 {
        let mut plus = [pose.x, pose.y, pose.theta];
        let mut minus = plus;
        plus[d] += step;
        minus[d] -= step;
        // headings are not re-wrapped so the perturbation stays exact
        let pp = Pose2 { x: plus[0], y: plus[1], theta: plus[2] };
        let pm = Pose2 { x: minus[0], y: minus[1], theta: minus[2] };
        let (dr, db) = diff(eval(&pp, landmark), eval(&pm, landmark));
        jp[(0, d)] = dr;
        jp[(1, d)] = db;
    }
    let mut jl = Matrix2::zeros();
    for d in 0..2 {
        let mut plus = [landmark.0, landmark.1];
        let mut minus = plus;
        plus[d] += step;
        minus[d] -= step;
        let (dr, db) = diff(eval(pose, (plus[0], plus[1])), eval(pose, (minus[0], minus[1])));
        jl[(0, d)] = dr;
        jl[(1, d)] = db;
    }
    (jp, jl)
}

/// Average ranks (1-based) with ties sharing the mean rank.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// Returns 1 when either input is constant and both are identical in order,
/// and 0 when exactly one input is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    match (va > 0.0, vb > 0.0) {
        (true, true) => cov / (va * vb).sqrt(),
        (false, false) => 1.0,
        _ => 0.0,
    }
}
