use num_complex::Complex64 as C64;

use super::{NoiseModel, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{check_unitary, expm_hermitian_generator, ComplexMatrix};

/// Closed-form phase damping of a single mode in the Fock basis:
/// ρ_nm(t) = e^{−iω(n−m)t} e^{−(n−m)²γt/2} ρ_nm(0).
pub fn phase_damped_solution(rho0: &ComplexMatrix, omega: f64, gamma: f64, t: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho0.dim(), |n, m| {
        let k = n as f64 - m as f64;
        rho0[(n, m)] * C64::from_polar((-0.5 * k * k * gamma * t).exp(), -omega * k * t)
    })
}

/// e^{−iGt}|Ψ(0)⟩ with G the scenario's ideal generator.
pub fn ideal_reference(scenario: &Scenario, t: f64) -> Result<Vec<C64>> {
    Ok(expm_hermitian_generator(&scenario.ideal_generator, t)?.matvec(&scenario.reference))
}

/// Mean of the noisy pulse, e^{−(γ/2)B²t} u0.
pub fn averaged_pulse(noise: &NoiseModel, u0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    u0.ensure_dim(noise.dim())?;
    check_unitary(u0)?;
    Ok(noise.mean_factor(t).matmul(u0))
}

/// One realization of the noisy pulse, e^{−i√γ B w} u0 for W_t = w.
pub fn noisy_pulse(noise: &NoiseModel, u0: &ComplexMatrix, w: f64) -> Result<ComplexMatrix> {
    u0.ensure_dim(noise.dim())?;
    Ok(noise.pulse_factor(w).matmul(u0))
}
