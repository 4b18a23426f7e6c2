use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖A − A†‖ = {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (‖U†U − I‖ = {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix exponential overflow (norm {norm:e} needs {squarings} squarings)")]
    Overflow { norm: f64, squarings: u32 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("tensor product of an empty operator list")]
    EmptyList,
    #[error("phase {phi} outside (0, π]")]
    PhiOutOfRange { phi: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("pulse count {n} is not a multiple of the cycle length {cycle}")]
    NotCycleMultiple { n: usize, cycle: usize },
    #[error("ambiguous eigenvalue clustering: gap {gap:e} inside ({tol:e}, {upper:e})")]
    ClusterAmbiguity { gap: f64, tol: f64, upper: f64 },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
