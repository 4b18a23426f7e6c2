//! Numerical tolerances shared by the library and its tests.

/// Hermiticity check: ‖A − A†‖ ≤ HERMITIAN · max(1, ‖A‖).
pub const HERMITIAN: f64 = 1e-10;
/// Unitarity check: ‖U†U − I‖ ≤ UNITARY.
pub const UNITARY: f64 = 1e-10;
/// Eigen reconstruction residual, relative to ‖A‖.
pub const RECONSTRUCTION: f64 = 1e-9;
/// A cycle unitary closer than this to the identity is treated as the identity.
pub const CYCLE_IDENTITY: f64 = 1e-8;
/// Default eigenphase clustering threshold for the ergodic projector.
pub const CLUSTER: f64 = 1e-8;
/// Negative ⟨ψ|ρ|ψ⟩ above this is rounding noise and clamps to zero.
pub const FIDELITY_CLAMP: f64 = 1e-10;
/// Lowest eigenvalue accepted for a density matrix.
pub const PSD_FLOOR: f64 = -1e-10;
/// Trace tolerance for density matrices.
pub const TRACE: f64 = 1e-10;
/// Top-Fock-level population above which truncation leakage is reported.
pub const LEAKAGE_WARN: f64 = 1e-6;
