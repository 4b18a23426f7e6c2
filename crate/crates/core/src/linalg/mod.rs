//! Dense complex linear algebra: the matrix type, spectral decompositions,
//! exponentials and the operator norm.

mod eig;
mod expm;
mod matrix;
pub mod random;

pub(crate) use eig::hermitian_eig_unchecked;
pub use eig::{
    check_hermitian, check_unitary, expm_hermitian_generator, hermitian_eig, operator_norm, unitarity_residual,
    unitary_eig, EigenDecomposition,
};
pub use expm::expm_general;
pub use matrix::ComplexMatrix;
