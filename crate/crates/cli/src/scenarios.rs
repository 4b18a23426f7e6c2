//! Builds the physical model, decoupling scheme and error operator from a config.

use ddsim::dynamics::Scenario;
use ddsim::linalg::ComplexMatrix;
use ddsim::operators::{
    boson_ladder, coherent_state, number_operator, parity_phase_pulse, partial_trace, pauli, site_operator,
    spin_bath_hamiltonian, tensor, Axis, BosonicSpace, PauliCoefficients, QubitRegister,
};
use ddsim::scheme::{scheme_limit, DecouplingScheme};
use ddsim::{tol, C64};

use crate::config::{ErrorSpec, ExperimentConfig, InitialState, ModelParams};
use crate::error::{CliError, ConfigError};

/// Everything a runner needs besides the noise strength.
#[derive(Debug, Clone)]
pub struct Model {
    pub scenario: Scenario,
    pub scheme: DecouplingScheme,
    pub error: ComplexMatrix,
    /// True when every site is a qubit, so operators can be shown as Pauli strings.
    pub qubits: bool,
}

fn protected_ket(initial: InitialState) -> Vec<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match initial {
        InitialState::Eigenstate => vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        InitialState::Superposition => vec![C64::new(h, 0.0), C64::new(h, 0.0)],
    }
}

/// |ψ⟩⟨ψ| on site 0 with every other site maximally mixed.
fn product_state(psi: &[C64], env_dim: usize) -> ComplexMatrix {
    ComplexMatrix::outer(psi).kron(&ComplexMatrix::identity(env_dim).scale_real(1.0 / env_dim as f64))
}

fn pauli_string_pulses(tokens: &[String], n_sites: usize) -> Result<Vec<ComplexMatrix>, ConfigError> {
    tokens
        .iter()
        .map(|tok| {
            let axes: Option<Vec<Axis>> = tok.chars().map(|c| Axis::parse(&c.to_string())).collect();
            match axes {
                Some(axes) if axes.len() == n_sites => tensor(&axes.into_iter().map(pauli).collect::<Vec<_>>())
                    .map_err(|e| ConfigError::field("scheme.pulses", None, e.to_string())),
                _ => Err(ConfigError::field(
                    "scheme.pulses",
                    None,
                    format!("`{tok}` is not a Pauli string of length {n_sites}"),
                )),
            }
        })
        .collect()
}

/// Reference generator on site 0: the site-0 part of the noiseless scheme limit of `h`.
fn ideal_generator(scheme: &DecouplingScheme, h: &ComplexMatrix, dims: &[usize]) -> Result<ComplexMatrix, CliError> {
    let zero = ComplexMatrix::zeros(h.dim());
    let limit = scheme_limit(scheme, h, &zero, tol::CLUSTER)?;
    let env: usize = dims[1..].iter().product();
    Ok(partial_trace(&limit.effective_hamiltonian, dims, &[0])?.scale_real(1.0 / env as f64).hermitian_part())
}

pub fn build(config: &ExperimentConfig) -> Result<Model, CliError> {
    match (&config.model, &config.error) {
        (ModelParams::TwoQubit { omega, g, initial }, ErrorSpec::Product { alpha, beta }) => {
            let reg = QubitRegister::qubits(2)?;
            let sz = pauli(Axis::Z);
            let sx = pauli(Axis::X);
            let h = &(&reg.embed(&sz, 0)? + &reg.embed(&sz, 1)?).scale_real(omega / 2.0) + &sx.kron(&sx).scale_real(*g);
            let b1 = site_operator(PauliCoefficients::new(alpha[0], alpha[1], alpha[2], alpha[3]));
            let b2 = site_operator(PauliCoefficients::new(beta[0], beta[1], beta[2], beta[3]));
            let scheme = DecouplingScheme::new(4, pauli_string_pulses(&config.pulses, 2)?)?;
            let dims = vec![2, 2];
            let psi = protected_ket(*initial);
            let generator = ideal_generator(&scheme, &h, &dims)?;
            let scenario = Scenario::new("two_qubit", h, product_state(&psi, 2), dims, vec![0], generator, psi)?;
            Ok(Model { scenario, scheme, error: b1.kron(&b2), qubits: true })
        }
        (ModelParams::SpinBath { nuclei, omegas, couplings, initial }, ErrorSpec::PauliString(axes)) => {
            let n_sites = nuclei + 1;
            let h = spin_bath_hamiltonian(*nuclei, omegas, couplings)?;
            let dim = h.dim();
            let b = pauli_string_pulses(std::slice::from_ref(axes), n_sites)
                .map_err(|e| ConfigError::field("error.axes", None, e.to_string()))?
                .remove(0);
            let scheme = DecouplingScheme::new(dim, pauli_string_pulses(&config.pulses, n_sites)?)?;
            let dims = vec![2; n_sites];
            let psi = protected_ket(*initial);
            let generator = ideal_generator(&scheme, &h, &dims)?;
            let scenario = Scenario::new("spin_bath", h, product_state(&psi, dim / 2), dims, vec![0], generator, psi)?;
            Ok(Model { scenario, scheme, error: b, qubits: true })
        }
        (
            ModelParams::Oscillator { dim, omega_a, omega_b, g, phi, alpha },
            ErrorSpec::Mode { number, displacement },
        ) => {
            let space = BosonicSpace::new(*dim)?;
            let id = ComplexMatrix::identity(*dim);
            let n_op = number_operator(space);
            let (a, a_dag) = boson_ladder(space);
            let x = &a + &a_dag;
            let h = &(&n_op.kron(&id).scale_real(*omega_a) + &id.kron(&n_op).scale_real(*omega_b))
                + &x.kron(&x).scale_real(*g);
            let b = (&n_op.scale_real(*number) + &x.scale_real(*displacement)).kron(&id);
            let pulses = config
                .pulses
                .iter()
                .map(|tok| match tok.as_str() {
                    "parity" => Ok(parity_phase_pulse(space, std::f64::consts::PI)?.kron(&id)),
                    "phase" => Ok(parity_phase_pulse(space, *phi)?.kron(&id)),
                    "identity" => Ok(ComplexMatrix::identity(dim * dim)),
                    other => Err(CliError::Config(ConfigError::field(
                        "scheme.pulses",
                        None,
                        format!("`{other}` is not one of parity, phase, identity"),
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let scheme = DecouplingScheme::new(dim * dim, pulses)?;
            let dims = vec![*dim, *dim];
            let psi = coherent_state(space, C64::new(alpha.0, alpha.1));
            let mut vacuum = vec![C64::new(0.0, 0.0); *dim];
            vacuum[0] = C64::new(1.0, 0.0);
            let rho0 = ComplexMatrix::outer(&psi).kron(&ComplexMatrix::outer(&vacuum));
            let generator = ideal_generator(&scheme, &h, &dims)?;
            let scenario = Scenario::new("oscillator", h, rho0, dims, vec![0], generator, psi)?;
            Ok(Model { scenario, scheme, error: b, qubits: false })
        }
        _ => unreachable!("the parser pairs each scenario with its error form"),
    }
}
