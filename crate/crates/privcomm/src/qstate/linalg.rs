//! Hermitian eigendecomposition helper.

use super::{C64, CMat};
use crate::{Error, Result};
use nalgebra::{DVector, SymmetricEigen};

pub struct HermitianEigen {
    pub values: DVector<f64>,
    /// Column j is the eigenvector for values[j].
    pub vectors: CMat,
}

/// Eigendecomposition of a (numerically) Hermitian matrix. The input is
/// symmetrized as (M + M^dag)/2 first; inputs that are far from Hermitian are
/// rejected.
pub fn hermitian_eigen(m: &CMat) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch("eigendecomposition of non-square matrix".into()));
    }
    let n = m.nrows();
    let dev = (m - m.adjoint()).norm();
    if dev > 1e-7 * (n as f64).max(1.0) {
        return Err(Error::InvalidState(format!("matrix is not Hermitian (dev {dev:.3e})")));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    Ok(HermitianEigen { values: eig.eigenvalues, vectors: eig.eigenvectors })
}
