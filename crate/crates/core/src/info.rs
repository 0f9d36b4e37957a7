//! Fisher information (Hessian) blocks attached to pose-graph edges.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance used when checking symmetry.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_TOL * |lambda|_max` are accepted as round-off.
pub const PSD_TOL: f64 = 1e-9;

/// A symmetric positive-semidefinite 3×3 information matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMatrix(Matrix3<f64>);

fn symmetric_within_tol(m: &Matrix3<f64>) -> bool {
    let scale = m.abs().max().max(f64::MIN_POSITIVE);
    (m - m.transpose()).abs().max() <= SYMMETRY_TOL * scale
}

impl InfoMatrix {
    /// Validates symmetry and positive semidefiniteness, then stores the
    /// exactly symmetrized matrix.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("information matrix has non-finite entries"));
        }
        if !symmetric_within_tol(&m) {
            return Err(Error::invalid("information matrix is not symmetric"));
        }
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym).eigenvalues;
        let lmax = eig.abs().max();
        if eig.iter().any(|&l| l < -PSD_TOL * lmax) {
            return Err(Error::invalid(
                "information matrix has negative eigenvalues",
            ));
        }
        Ok(Self(sym))
    }

    /// Symmetrizes `m` and clamps negative eigenvalues to zero.
    pub fn project_psd(m: &Matrix3<f64>) -> Self {
        let sym = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let clamped = eig.eigenvalues.map(|l| l.max(0.0));
        let out = eig.eigenvectors * Matrix3::from_diagonal(&clamped) * eig.eigenvectors.transpose();
        Self((out + out.transpose()) * 0.5)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn zeros() -> Self {
        Self(Matrix3::zeros())
    }

    pub fn from_diagonal(d: [f64; 3]) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&d.into()))
    }

    /// Builds from the upper triangle `[I11, I12, I13, I22, I23, I33]`.
    pub fn from_upper(u: [f64; 6]) -> Result<Self> {
        Self::new(Matrix3::new(
            u[0], u[1], u[2], //
            u[1], u[3], u[4], //
            u[2], u[4], u[5],
        ))
    }

    pub fn upper(&self) -> [f64; 6] {
        let m = &self.0;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 1)], m[(1, 2)], m[(2, 2)]]
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Multiplies every entry by a nonnegative factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }

    /// Sum of two information matrices.
    pub fn add(&self, other: &InfoMatrix) -> Self {
        Self(self.0 + other.0)
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        [e[0], e[1], e[2]]
    }

    pub fn is_symmetric(&self) -> bool {
        symmetric_within_tol(&self.0)
    }
}
