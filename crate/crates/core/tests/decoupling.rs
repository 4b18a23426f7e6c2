use ddsim::dynamics::{averaged_lindblad, FinitePulseEvolution, NoiseModel, Scenario};
use ddsim::ensemble::{map_trials, map_trials_sequential};
use ddsim::metrics::opnorm_distance;
use ddsim::operators::{pauli, Axis, QubitRegister};
use ddsim::scheme::{scheme_limit, DecouplingScheme};
use ddsim::stochastic::{sample_terminal, RngStream};
use ddsim::{tol, ComplexMatrix, C64};

const OMEGA: f64 = 1.2;
const G: f64 = 0.35;

/// Qubit 0 in |+⟩ next to a maximally mixed qubit 1, coupled by g σx⊗σx.
fn two_qubits() -> (Scenario, DecouplingScheme) {
    let reg = QubitRegister::qubits(2).unwrap();
    let (sx, sz) = (pauli(Axis::X), pauli(Axis::Z));
    let h = &reg.embed(&sz, 0).unwrap().scale_real(OMEGA / 2.0) + &sx.kron(&sx).scale_real(G);
    let h_plus = std::f64::consts::FRAC_1_SQRT_2;
    let psi = vec![C64::new(h_plus, 0.0), C64::new(h_plus, 0.0)];
    let rho0 = ComplexMatrix::outer(&psi).kron(&ComplexMatrix::identity(2).scale_real(0.5));
    let scenario = Scenario::new("pair", h, rho0, vec![2, 2], vec![0], sz.scale_real(OMEGA / 2.0), psi).unwrap();
    let scheme = DecouplingScheme::new(4, vec![reg.embed(&sz, 0).unwrap()]).unwrap();
    (scenario, scheme)
}

fn error_operator() -> ComplexMatrix {
    (&pauli(Axis::Z) + &pauli(Axis::X)).kron(&ComplexMatrix::identity(2))
}

#[test]
fn noiseless_pulses_converge_to_the_limit_evolution() {
    let (scenario, scheme) = two_qubits();
    let noise = NoiseModel::noiseless(4);
    let limit = scheme_limit(&scheme, &scenario.hamiltonian, noise.b(), tol::CLUSTER).unwrap();
    let t = 3.0;
    let target = averaged_lindblad(&limit.effective_hamiltonian, noise.b(), 0.0, &scenario.rho0, t, 1).unwrap();
    let target = target.last().unwrap();
    let mut last = f64::INFINITY;
    for n in [8, 32, 128, 512] {
        let rho = FinitePulseEvolution::new(&scenario, &scheme, &noise, t, n).unwrap().evolve(0.0);
        let d = opnorm_distance(&rho, target).unwrap();
        assert!(d < last, "N = {n}: {d} did not shrink from {last}");
        last = d;
    }
    assert!(last < 1e-2, "{last}");
}

#[test]
fn averaged_noisy_pulses_match_the_limit_master_equation() {
    let (scenario, scheme) = two_qubits();
    let (gamma, t, n, trials) = (0.8, 2.0, 256, 4000);
    let noise = NoiseModel::new(error_operator(), gamma).unwrap();
    let limit = scheme_limit(&scheme, &scenario.hamiltonian, noise.b(), tol::CLUSTER).unwrap();
    assert!((&limit.effective_error - &pauli(Axis::Z).kron(&ComplexMatrix::identity(2))).max_abs() < 1e-12);

    let evolution = FinitePulseEvolution::new(&scenario, &scheme, &noise, t, n).unwrap();
    let states = map_trials(trials, |i| {
        let w = sample_terminal(&mut RngStream::new(17, i), t).unwrap();
        evolution.evolve(w)
    });
    let mut mean = ComplexMatrix::zeros(4);
    for rho in &states {
        mean += rho;
    }
    let mean = mean.scale_real(1.0 / trials as f64);
    let averaged =
        averaged_lindblad(&limit.effective_hamiltonian, &limit.effective_error, gamma, &scenario.rho0, t, 200).unwrap();
    let d = opnorm_distance(&mean, averaged.last().unwrap()).unwrap();
    assert!(d < 0.03, "{d}");
}

#[test]
fn trial_maps_agree_across_backends() {
    let (scenario, scheme) = two_qubits();
    let noise = NoiseModel::new(error_operator(), 1.5).unwrap();
    let evolution = FinitePulseEvolution::new(&scenario, &scheme, &noise, 1.0, 16).unwrap();
    let run = |i: u64| {
        let w = sample_terminal(&mut RngStream::new(5, i), 1.0).unwrap();
        scenario.fidelity_at(&evolution.evolve(w), 1.0).unwrap().to_bits()
    };
    assert_eq!(map_trials(64, run), map_trials_sequential(64, run));
}
