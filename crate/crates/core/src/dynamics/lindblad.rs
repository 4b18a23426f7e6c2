use num_complex::Complex64 as C64;

use super::TrajectoryResult;
use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, expm_general, ComplexMatrix};

/// Largest Hilbert-space dimension for the dense superoperator route (256×256).
pub const SUPEROPERATOR_DIM_CAP: usize = 16;

/// Largest ‖L‖·h accepted for one RK4 substep.
const RK4_STEP_SCALE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LindbladMethod {
    /// Superoperator exponential up to the cap, RK4 beyond.
    #[default]
    Auto,
    Superoperator,
    Stepwise,
}

/// L = −i(ℋ⊗I − I⊗ℋᵀ) − (γ/2)(ℬ²⊗I + I⊗(ℬ²)ᵀ − 2ℬ⊗ℬᵀ), acting on the
/// row-major vectorization vec(ρ)[i·d + j] = ρ_ij.
pub fn lindblad_superoperator(h: &ComplexMatrix, b: &ComplexMatrix, gamma: f64) -> Result<ComplexMatrix> {
    let d = h.dim();
    if d > SUPEROPERATOR_DIM_CAP {
        return Err(Error::DimensionTooLarge { dim: d, cap: SUPEROPERATOR_DIM_CAP });
    }
    check_hermitian(h)?;
    b.ensure_dim(d)?;
    check_hermitian(b)?;
    let id = ComplexMatrix::identity(d);
    let b2 = b.matmul(b);
    let coherent = (&h.kron(&id) - &id.kron(&h.transpose())).scale(C64::new(0.0, -1.0));
    let dissipative = &(&b2.kron(&id) + &id.kron(&b2.transpose())) - &b.kron(&b.transpose()).scale_real(2.0);
    Ok(&coherent - &dissipative.scale_real(0.5 * gamma))
}

/// exp(L·dt) for fixed (ℋ, ℬ, γ, dt), reused across all steps of a time series.
#[derive(Debug, Clone)]
pub struct LindbladPropagator {
    dim: usize,
    step: ComplexMatrix,
    dt: f64,
}

impl LindbladPropagator {
    pub fn new(h: &ComplexMatrix, b: &ComplexMatrix, gamma: f64, dt: f64) -> Result<Self> {
        let l = lindblad_superoperator(h, b, gamma)?;
        let step = expm_general(&l.scale_real(dt))?;
        Ok(Self { dim: h.dim(), step, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        rho.ensure_dim(self.dim)?;
        let out = self.step.matvec(rho.as_slice());
        ComplexMatrix::from_row_major(out)
    }
}

/// −i[ℋ, ρ] − (γ/2)[ℬ, [ℬ, ρ]].
fn lindblad_rhs(h: &ComplexMatrix, b: &ComplexMatrix, gamma: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let coherent = h.commutator(rho).scale(C64::new(0.0, -1.0));
    let double = b.commutator(&b.commutator(rho));
    &coherent - &double.scale_real(0.5 * gamma)
}

fn rk4_step(h: &ComplexMatrix, b: &ComplexMatrix, gamma: f64, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let k1 = lindblad_rhs(h, b, gamma, rho);
    let k2 = lindblad_rhs(h, b, gamma, &(rho + &k1.scale_real(dt / 2.0)));
    let k3 = lindblad_rhs(h, b, gamma, &(rho + &k2.scale_real(dt / 2.0)));
    let k4 = lindblad_rhs(h, b, gamma, &(rho + &k3.scale_real(dt)));
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
    rho + &incr.scale_real(dt / 6.0)
}

/// Solves dρ/dt = −i[ℋ,ρ] − (γ/2)[ℬ,[ℬ,ρ]] on t_k = k·t/steps, k = 0…steps.
pub fn averaged_lindblad(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    gamma: f64,
    rho0: &ComplexMatrix,
    t: f64,
    steps: usize,
) -> Result<TrajectoryResult> {
    averaged_lindblad_with(h, b, gamma, rho0, t, steps, LindbladMethod::Auto)
}

pub fn averaged_lindblad_with(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    gamma: f64,
    rho0: &ComplexMatrix,
    t: f64,
    steps: usize,
    method: LindbladMethod,
) -> Result<TrajectoryResult> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("averaged evolution needs at least one step".into()));
    }
    let d = h.dim();
    rho0.ensure_dim(d)?;
    let dt = t / steps as f64;
    let use_superoperator = match method {
        LindbladMethod::Superoperator => true,
        LindbladMethod::Stepwise => false,
        LindbladMethod::Auto => d <= SUPEROPERATOR_DIM_CAP,
    };
    let mut states = Vec::with_capacity(steps + 1);
    states.push(rho0.clone());
    if use_superoperator {
        let prop = LindbladPropagator::new(h, b, gamma, dt)?;
        for _ in 0..steps {
            let next = prop.apply(states.last().unwrap())?;
            states.push(next);
        }
    } else {
        check_hermitian(h)?;
        b.ensure_dim(d)?;
        check_hermitian(b)?;
        let scale = 2.0 * h.frobenius_norm() + 2.0 * gamma * b.frobenius_norm().powi(2);
        let substeps = ((dt * scale / RK4_STEP_SCALE).ceil() as usize).max(1);
        let h_sub = dt / substeps as f64;
        for _ in 0..steps {
            let mut rho = states.last().unwrap().clone();
            for _ in 0..substeps {
                rho = rk4_step(h, b, gamma, &rho, h_sub);
            }
            states.push(rho);
        }
    }
    let abscissa = (0..=steps).map(|k| k as f64 * dt).collect();
    Ok(TrajectoryResult { abscissa, states, wiener: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_hermitian};
    use crate::linalg::{expm_hermitian_generator, operator_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn superoperator_matches_the_commutator_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let rho = random_density(3, &mut rng);
        let l = lindblad_superoperator(&h, &b, 0.8).unwrap();
        let lhs = ComplexMatrix::from_row_major(l.matvec(rho.as_slice())).unwrap();
        let rhs = lindblad_rhs(&h, &b, 0.8, &rho);
        assert!((&lhs - &rhs).max_abs() < 1e-13);
    }

    #[test]
    fn zero_noise_is_unitary_liouville_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let rho0 = random_density(4, &mut rng);
        let res = averaged_lindblad(&h, &b, 0.0, &rho0, 1.2, 6).unwrap();
        let exact = expm_hermitian_generator(&h, 1.2).unwrap().conjugate(&rho0);
        assert!((res.last().unwrap() - &exact).max_abs() < 1e-11);
    }

    #[test]
    fn identity_error_has_no_effect() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        let rho0 = random_density(4, &mut rng);
        let b = ComplexMatrix::identity(4).scale_real(1.7);
        let noisy = averaged_lindblad(&h, &b, 5.0, &rho0, 2.0, 4).unwrap();
        let clean = averaged_lindblad(&h, &b, 0.0, &rho0, 2.0, 4).unwrap();
        assert!((noisy.last().unwrap() - clean.last().unwrap()).max_abs() < 1e-11);
    }

    #[test]
    fn trace_is_preserved_and_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let rho0 = random_density(4, &mut rng);
        let sup = averaged_lindblad_with(&h, &b, 0.6, &rho0, 3.0, 30, LindbladMethod::Superoperator).unwrap();
        let rk = averaged_lindblad_with(&h, &b, 0.6, &rho0, 3.0, 30, LindbladMethod::Stepwise).unwrap();
        for (a, c) in sup.states.iter().zip(&rk.states) {
            assert!((a.trace().re - 1.0).abs() < 1e-10);
            assert!((c.trace().re - 1.0).abs() < 1e-10);
            assert!(operator_norm(&(a - c)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn superoperator_route_is_capped() {
        let h = ComplexMatrix::zeros(32);
        let rho0 = ComplexMatrix::identity(32).scale_real(1.0 / 32.0);
        assert!(matches!(
            averaged_lindblad_with(&h, &h, 1.0, &rho0, 1.0, 1, LindbladMethod::Superoperator),
            Err(Error::DimensionTooLarge { dim: 32, cap: 16 })
        ));
        let auto = averaged_lindblad(&h, &h, 1.0, &rho0, 1.0, 1).unwrap();
        assert!((auto.last().unwrap() - &rho0).max_abs() < 1e-15);
    }
}
