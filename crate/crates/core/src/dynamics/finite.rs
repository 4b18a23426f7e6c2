use super::{NoiseModel, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian_generator, ComplexMatrix};
use crate::scheme::DecouplingScheme;

/// N noisy pulses spread evenly over [0, t].
///
/// Slot k applies free evolution e^{−iHt/N}, then the pulse u_k, then the
/// noise factor e^{−i√γ B w}, where w is the per-pulse Wiener argument shared
/// by every slot of the run. Since every cycle of M slots is the same matrix,
/// the full product is the cycle product raised to N/M.
#[derive(Debug, Clone)]
pub struct FinitePulseEvolution<'a> {
    scenario: &'a Scenario,
    scheme: &'a DecouplingScheme,
    noise: &'a NoiseModel,
    n: usize,
    free: ComplexMatrix,
}

impl<'a> FinitePulseEvolution<'a> {
    pub fn new(
        scenario: &'a Scenario,
        scheme: &'a DecouplingScheme,
        noise: &'a NoiseModel,
        t: f64,
        n: usize,
    ) -> Result<Self> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        let cycle = scheme.cycle_length();
        if n == 0 || !n.is_multiple_of(cycle) {
            return Err(Error::NotCycleMultiple { n, cycle });
        }
        let dim = scenario.dim();
        scheme.cycle_unitary().ensure_dim(dim)?;
        noise.b().ensure_dim(dim)?;
        let free = expm_hermitian_generator(&scenario.hamiltonian, t / n as f64)?;
        Ok(Self { scenario, scheme, noise, n, free })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// U_N for a terminal Wiener value W_t; every pulse sees W_t / N.
    pub fn propagator(&self, w_t: f64) -> ComplexMatrix {
        self.propagator_with_pulse_value(w_t / self.n as f64)
    }

    /// U_N with an explicit per-pulse Wiener argument.
    pub fn propagator_with_pulse_value(&self, w: f64) -> ComplexMatrix {
        let pulses = self.scheme.pulses();
        if pulses.is_empty() {
            return self.free.pow(self.n as u64);
        }
        let noisy = self.noise.gamma() > 0.0 && w != 0.0;
        let factor = if noisy { Some(self.noise.pulse_factor(w)) } else { None };
        let mut cycle = ComplexMatrix::identity(self.free.dim());
        for u in pulses {
            let mut slot = u.matmul(&self.free);
            if let Some(f) = &factor {
                slot = f.matmul(&slot);
            }
            cycle = slot.matmul(&cycle);
        }
        cycle.pow((self.n / pulses.len()) as u64)
    }

    /// U_N ρ0 U_N†.
    pub fn evolve(&self, w_t: f64) -> ComplexMatrix {
        self.propagator(w_t).conjugate(&self.scenario.rho0)
    }

    pub fn evolve_with_pulse_value(&self, w: f64) -> ComplexMatrix {
        self.propagator_with_pulse_value(w).conjugate(&self.scenario.rho0)
    }
}

/// U_N ρ0 U_N† for one run with terminal Wiener value `w_t`.
pub fn propagate_finite_pulses(
    scenario: &Scenario,
    scheme: &DecouplingScheme,
    noise: &NoiseModel,
    t: f64,
    n: usize,
    w_t: f64,
) -> Result<ComplexMatrix> {
    Ok(FinitePulseEvolution::new(scenario, scheme, noise, t, n)?.evolve(w_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_hermitian, random_unitary};
    use crate::linalg::{hermitian_eig, unitarity_residual};
    use crate::operators::{pauli, tensor, Axis};
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scenario(h: ComplexMatrix, rho0: ComplexMatrix) -> Scenario {
        let d = h.dim();
        Scenario::new(
            "test",
            h,
            rho0,
            vec![d],
            vec![0],
            ComplexMatrix::zeros(d),
            (0..d).map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
        )
        .unwrap()
    }

    /// Slot-by-slot product, written out without the cycle-power shortcut.
    fn brute_force(
        sc: &Scenario,
        scheme: &DecouplingScheme,
        noise: &NoiseModel,
        t: f64,
        n: usize,
        w_t: f64,
    ) -> ComplexMatrix {
        let free = expm_hermitian_generator(&sc.hamiltonian, t / n as f64).unwrap();
        let f = noise.pulse_factor(w_t / n as f64);
        let mut u = ComplexMatrix::identity(sc.dim());
        for k in 1..=n {
            let pulse = scheme.pulse_at(k).unwrap();
            u = f.matmul(pulse).matmul(&free).matmul(&u);
        }
        u.conjugate(&sc.rho0)
    }

    #[test]
    fn single_identity_pulse_is_plain_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(3, &mut rng);
        let sc = scenario(h.clone(), random_density(3, &mut rng));
        let scheme = DecouplingScheme::repeated(ComplexMatrix::identity(3)).unwrap();
        let noise = NoiseModel::noiseless(3);
        let rho = propagate_finite_pulses(&sc, &scheme, &noise, 1.7, 1, 0.3).unwrap();
        let expected = expm_hermitian_generator(&h, 1.7).unwrap().conjugate(&sc.rho0);
        assert!((&rho - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn matches_slot_by_slot_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(4, &mut rng);
        let sc = scenario(h, random_density(4, &mut rng));
        let scheme = DecouplingScheme::new(4, vec![random_unitary(4, &mut rng), random_unitary(4, &mut rng)]).unwrap();
        let noise = NoiseModel::new(random_hermitian(4, &mut rng), 0.7).unwrap();
        let cycle = scheme.cycle_length();
        for n in [cycle, 3 * cycle, 8 * cycle] {
            let fast = propagate_finite_pulses(&sc, &scheme, &noise, 2.0, n, -0.9).unwrap();
            let slow = brute_force(&sc, &scheme, &noise, 2.0, n, -0.9);
            assert!((&fast - &slow).max_abs() < 1e-11);
        }
    }

    #[test]
    fn propagator_is_unitary_and_state_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sc = scenario(random_hermitian(4, &mut rng), random_density(4, &mut rng));
        let scheme = DecouplingScheme::repeated(pauli(Axis::Z).kron(&ComplexMatrix::identity(2))).unwrap();
        let noise = NoiseModel::new(random_hermitian(4, &mut rng), 2.0).unwrap();
        let evo = FinitePulseEvolution::new(&sc, &scheme, &noise, 5.0, 512).unwrap();
        let u = evo.propagator(1.4);
        assert!(unitarity_residual(&u) < 1e-9);
        let rho = evo.evolve(1.4);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!((&rho - &rho.adjoint()).max_abs() < 1e-12);
        assert!(hermitian_eig(&rho.hermitian_part()).unwrap().real_eigenvalues()[0] > -1e-9);
    }

    #[test]
    fn rejects_non_multiples_of_the_cycle() {
        let sc = scenario(ComplexMatrix::zeros(2), ComplexMatrix::real_diagonal(&[1.0, 0.0]));
        let scheme = DecouplingScheme::repeated(pauli(Axis::Z)).unwrap();
        let noise = NoiseModel::noiseless(2);
        assert_eq!(
            propagate_finite_pulses(&sc, &scheme, &noise, 1.0, 3, 0.0).unwrap_err(),
            Error::NotCycleMultiple { n: 3, cycle: 2 }
        );
    }

    #[test]
    fn commuting_noise_leaves_eigenstate_unchanged() {
        let id = ComplexMatrix::identity(2);
        let z = pauli(Axis::Z);
        let free = &tensor(&[z.clone(), id.clone()]).unwrap() + &tensor(&[id.clone(), z.clone()]).unwrap();
        let h = &free.scale_real(0.5) + &tensor(&[pauli(Axis::X), pauli(Axis::X)]).unwrap().scale_real(0.1);
        let ket0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let rho0 = ket0.kron(&id.scale_real(0.5));
        let sc = Scenario::new(
            "eigenstate",
            h,
            rho0,
            vec![2, 2],
            vec![0],
            z.scale_real(0.5),
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let scheme = DecouplingScheme::repeated(tensor(&[z.clone(), id.clone()]).unwrap()).unwrap();
        let b = tensor(&[z.clone(), z.clone()]).unwrap();
        let noisy = NoiseModel::new(b, 5.0).unwrap();
        let clean = NoiseModel::noiseless(4);
        for n in [2, 16, 128] {
            for w in [-2.0, 0.4, 3.1] {
                let a = sc.reduced(&propagate_finite_pulses(&sc, &scheme, &noisy, 10.0, n, w).unwrap()).unwrap();
                let b = sc.reduced(&propagate_finite_pulses(&sc, &scheme, &clean, 10.0, n, w).unwrap()).unwrap();
                assert!((&a - &b).max_abs() < 1e-12);
            }
        }
    }
}
