//! Optimality criteria over information matrices and weighted pose-graphs.
//!
//! The decision path uses [`dopt_graph`]: the D-optimality of a weighted
//! pose-graph computed from its weighted number of spanning trees,
//! `(|V| · t(G))^(1/|V|)`, with `t(G)` obtained as the determinant of the
//! reduced weighted Laplacian (Kirchhoff's theorem). All spanning-tree
//! arithmetic is carried out in log-space.
//!
//! [`assemble_full_fim`] builds the dense `|V|ℓ × |V|ℓ` Fisher information
//! of the same graph. It is only used to check how well the topological
//! criterion ranks candidates compared to the full matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::WeightedPoseGraph;
use crate::info::InfoMatrix;

/// Eigenvalues at or below `EIGEN_FLOOR * lambda_max` make D-opt zero.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Cholesky pivots at or below `PIVOT_FLOOR * max_diag` mean the graph is disconnected.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Degrees of freedom of an SE(2) pose.
pub const POSE_DOF: usize = 3;

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid("matrix is not square"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::invalid("matrix is not symmetric"));
            }
        }
    }
    Ok(())
}

fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// Kiefer's criterion `((1/ℓ) trace(M^p))^(1/p)` for `p != 0`.
pub fn kiefer_criterion(m: &DMatrix<f64>, p: f64) -> Result<f64> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::invalid("Kiefer criterion needs a finite p != 0; use dopt_matrix for p = 0"));
    }
    check_symmetric(m)?;
    let l = m.nrows();
    if l == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let eig = sym_eigenvalues(m);
    let lmax = eig.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if eig.iter().any(|&v| v < -1e-9 * lmax) {
        return Err(Error::invalid("matrix has negative eigenvalues"));
    }
    let mean = eig.iter().map(|&v| v.max(0.0).powf(p)).sum::<f64>() / l as f64;
    Ok(mean.powf(1.0 / p))
}

/// D-optimality: the geometric mean of the eigenvalues, or 0 when any
/// eigenvalue falls at or below the singularity floor.
pub fn dopt_matrix(m: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(m)?;
    let l = m.nrows();
    if l == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    Ok(dopt_from_eigenvalues(&sym_eigenvalues(m)))
}

fn dopt_from_eigenvalues(eig: &[f64]) -> f64 {
    let lmax = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lmax > 0.0) {
        return 0.0;
    }
    let floor = EIGEN_FLOOR * lmax;
    if eig.iter().any(|&v| v <= floor) {
        return 0.0;
    }
    (eig.iter().map(|v| v.ln()).sum::<f64>() / eig.len() as f64).exp()
}

/// [`dopt_matrix`] for a 3×3 edge information block.
pub fn dopt_info(h: &InfoMatrix) -> f64 {
    dopt_from_eigenvalues(&h.eigenvalues())
}

/// Weighted graph Laplacian; rows and columns follow vertex insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian(pub DMatrix<f64>);

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

pub fn weighted_laplacian(g: &WeightedPoseGraph) -> Laplacian {
    let n = g.num_vertices();
    let base = g.base();
    let mut l = DMatrix::zeros(n, n);
    for (e, w) in g.weighted_edges() {
        let i = base.index_of(e.from).expect("edge endpoints exist");
        let k = base.index_of(e.to).expect("edge endpoints exist");
        l[(i, i)] += w;
        l[(k, k)] += w;
        l[(i, k)] -= w;
        l[(k, i)] -= w;
    }
    Laplacian(l)
}

/// Log-determinant of a symmetric matrix via an in-place Cholesky
/// factorization. Returns `None` as soon as a pivot drops to `pivot_floor`.
pub(crate) fn cholesky_log_det(mut a: Vec<f64>, n: usize, pivot_floor: f64) -> Option<f64> {
    let mut log_det = 0.0;
    let mut pivot_row = vec![0.0; n];
    for j in 0..n {
        let row_j = &a[j * n..j * n + j + 1];
        let d = row_j[j] - row_j[..j].iter().map(|v| v * v).sum::<f64>();
        if !(d > pivot_floor) {
            return None;
        }
        let ljj = d.sqrt();
        log_det += 2.0 * ljj.ln();
        pivot_row[..j].copy_from_slice(&row_j[..j]);
        a[j * n + j] = ljj;
        for i in (j + 1)..n {
            let row_i = &mut a[i * n..i * n + j + 1];
            let dot: f64 = row_i[..j].iter().zip(&pivot_row[..j]).map(|(x, y)| x * y).sum();
            row_i[j] = (row_i[j] - dot) / ljj;
        }
    }
    Some(log_det)
}

/// Natural log of the weighted number of spanning trees `t(G)`.
///
/// Returns `-inf` when the graph is disconnected (a Cholesky pivot of the
/// reduced Laplacian falls at or below `PIVOT_FLOOR · max diagonal`).
pub fn log_tree_weight(g: &WeightedPoseGraph) -> Result<f64> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::invalid("spanning-tree weight needs at least two vertices"));
    }
    let lap = weighted_laplacian(g);
    let max_diag = (0..n).map(|i| lap.0[(i, i)]).fold(0.0f64, f64::max);
    let m = n - 1;
    let mut reduced = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            reduced.push(lap.0[(i, j)]);
        }
    }
    Ok(cholesky_log_det(reduced, m, PIVOT_FLOOR * max_diag).unwrap_or(f64::NEG_INFINITY))
}

/// Graph D-optimality `(|V| · t(G))^(1/|V|)`; 0 for disconnected graphs.
pub fn dopt_graph(g: &WeightedPoseGraph) -> Result<f64> {
    let ltw = log_tree_weight(g)?;
    if ltw == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let n = g.num_vertices() as f64;
    Ok(((n.ln() + ltw) / n).exp())
}

/// Dense pose-graph Fisher information `Σ_j A_jᵀ Φ_j A_j`, anchored by adding
/// the identity to the first vertex block.
#[derive(Debug, Clone, PartialEq)]
pub struct FullFim(pub DMatrix<f64>);

impl FullFim {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// The 3×3 block for vertex indices `(i, k)`.
    pub fn block(&self, i: usize, k: usize) -> DMatrix<f64> {
        self.0
            .view((i * POSE_DOF, k * POSE_DOF), (POSE_DOF, POSE_DOF))
            .into_owned()
    }
}

/// Assembles the full information matrix without the anchor.
pub fn assemble_unanchored_fim(g: &WeightedPoseGraph) -> DMatrix<f64> {
    let n = g.num_vertices();
    let base = g.base();
    let mut y = DMatrix::zeros(n * POSE_DOF, n * POSE_DOF);
    for e in base.edges() {
        let i = base.index_of(e.from).expect("edge endpoints exist") * POSE_DOF;
        let k = base.index_of(e.to).expect("edge endpoints exist") * POSE_DOF;
        let phi = e.info.matrix();
        for r in 0..POSE_DOF {
            for c in 0..POSE_DOF {
                let v = phi[(r, c)];
                y[(i + r, i + c)] += v;
                y[(k + r, k + c)] += v;
                y[(i + r, k + c)] -= v;
                y[(k + r, i + c)] -= v;
            }
        }
    }
    y
}

pub fn assemble_full_fim(g: &WeightedPoseGraph) -> FullFim {
    let mut y = assemble_unanchored_fim(g);
    if g.num_vertices() > 0 {
        for d in 0..POSE_DOF {
            y[(d, d)] += 1.0;
        }
    }
    FullFim(y)
}
