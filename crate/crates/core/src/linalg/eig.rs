use std::cmp::Ordering;

use nalgebra::{Schur, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tol;

const MAX_ITER: usize = 10_000;

/// Eigenvalues with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Real parts of the eigenvalues, for Hermitian inputs.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// V · f(Λ) · V† for a scalar function applied to each eigenvalue.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        // (V · diag) · V†, exploiting the diagonal.
        let mut scaled = v.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= fl[j];
            }
        }
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| l)
    }
}

fn eigen_order(a: &(C64, usize), b: &(C64, usize)) -> Ordering {
    a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)).then(a.1.cmp(&b.1))
}

fn sorted(eigenvalues: Vec<C64>, vectors: ComplexMatrix) -> EigenDecomposition {
    let n = vectors.dim();
    let mut order: Vec<(C64, usize)> = eigenvalues.into_iter().zip(0..).collect();
    order.sort_by(eigen_order);
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| vectors[(i, order[j].1)]);
    EigenDecomposition { eigenvalues: order.into_iter().map(|(l, _)| l).collect(), eigenvectors }
}

/// ‖A − A†‖ bounded from above by its Frobenius norm; ‖A‖ from below by ‖A‖_F / √n.
fn hermiticity_residual(a: &ComplexMatrix) -> (f64, f64) {
    let residual = (a - &a.adjoint()).frobenius_norm();
    let scale = a.frobenius_norm() / (a.dim() as f64).sqrt();
    (residual, scale)
}

pub fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let (residual, scale) = hermiticity_residual(a);
    if residual <= tol::HERMITIAN * scale.max(1.0) {
        Ok(())
    } else {
        Err(Error::NotHermitian { residual })
    }
}

pub(crate) fn hermitian_eig_unchecked(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let sym = a.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_ITER).ok_or(Error::NoConvergence)?;
    let values = eig.eigenvalues.iter().map(|&x| C64::new(x, 0.0)).collect();
    Ok(sorted(values, ComplexMatrix::from_nalgebra(&eig.eigenvectors)))
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(a)?;
    hermitian_eig_unchecked(a)
}

/// ‖U†U − I‖_op.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let defect = &u.adjoint().matmul(u) - &ComplexMatrix::identity(u.dim());
    let frob = defect.frobenius_norm();
    if frob <= tol::UNITARY {
        // Frobenius dominates the operator norm; skip the eigensolve.
        return frob;
    }
    operator_norm(&defect).unwrap_or(f64::INFINITY)
}

pub fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = unitarity_residual(u);
    if residual <= tol::UNITARY {
        Ok(())
    } else {
        Err(Error::NotUnitary { residual })
    }
}

/// Spectral decomposition of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal up to
/// rounding and the Schur vectors are an orthonormal eigenbasis. No matrix
/// logarithm is involved.
pub fn unitary_eig(u: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_unitary(u)?;
    let schur = Schur::try_new(u.to_nalgebra(), f64::EPSILON, MAX_ITER).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let values = (0..u.dim()).map(|i| t[(i, i)]).collect();
    Ok(sorted(values, ComplexMatrix::from_nalgebra(&q)))
}

/// Largest singular value, from the spectrum of A†A.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let gram = a.adjoint().matmul(a).hermitian_part().to_nalgebra();
    let values = gram.symmetric_eigenvalues();
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// e^{−iHs} for Hermitian H.
pub fn expm_hermitian_generator(h: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.apply(|l| C64::new(0.0, -l.re * s).exp()))
}
