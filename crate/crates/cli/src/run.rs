//! Experiment runners. Each returns the full output text; nothing is written
//! until every trial has been reduced.

use std::fmt::Write as _;

use ddsim::bounds::{
    deterministic_cycle_bound, empirical_distance, stochastic_bound_cycle2, stochastic_bound_cycle4, BoundInputs,
};
use ddsim::dynamics::{averaged_lindblad, refine_steps, FinitePulseEvolution, NoiseModel, SplitStepIntegrator};
use ddsim::ensemble::try_map_trials;
use ddsim::linalg::{operator_norm, ComplexMatrix};
use ddsim::metrics::{fidelity, FidelityCurve};
use ddsim::operators::partial_trace;
use ddsim::scheme::{scheme_limit, ErgodicProjector};
use ddsim::stochastic::{sample_path, sample_terminal, RngStream, WienerPath};
use ddsim::tol;

use crate::config::{ExperimentConfig, ScenarioKind};
use crate::error::{CliError, ConfigError};
use crate::output::{header, nonzero_entries, num, pauli_decomposition, CsvTable};
use crate::scenarios::{build, Model};

/// Operators with norm at or below this are reported as zero.
pub const ZERO_NORM: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Limits,
    SweepPulses,
    Trajectories,
    Bounds,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Limits => "limits",
            Command::SweepPulses => "sweep-pulses",
            Command::Trajectories => "trajectories",
            Command::Bounds => "bounds",
        }
    }
}

pub fn run(command: Command, config: &ExperimentConfig) -> Result<String, CliError> {
    match command {
        Command::Limits => run_limits(config),
        Command::SweepPulses => run_sweep_pulses(config),
        Command::Trajectories => run_trajectories(config),
        Command::Bounds => run_bounds(config),
    }
}

fn describe(out: &mut String, name: &str, x: &ComplexMatrix, model: &Model) {
    let _ = writeln!(out, "[{name}]");
    if model.qubits {
        for (p, re, im) in pauli_decomposition(x, model.scenario.site_dims.len(), ZERO_NORM) {
            let _ = writeln!(out, "{p} {} {}", num(re), num(im));
        }
    } else {
        out.push_str(&nonzero_entries(x, ZERO_NORM));
    }
}

/// ℋ and ℬ with their commutators with the cycle unitary.
pub fn run_limits(config: &ExperimentConfig) -> Result<String, CliError> {
    let model = build(config)?;
    let limits = scheme_limit(&model.scheme, &model.scenario.hamiltonian, &model.error, tol::CLUSTER)?;
    let u = model.scheme.cycle_unitary();
    let (h, b) = (&limits.effective_hamiltonian, &limits.effective_error);
    let h_norm = operator_norm(h)?;
    let b_norm = operator_norm(b)?;
    let clusters =
        if model.scheme.cycle_is_identity() { 1 } else { ErgodicProjector::new(u, tol::CLUSTER)?.n_clusters() };
    let dims = &model.scenario.site_dims;
    let env: usize = dims[1..].iter().product();
    let protected = partial_trace(h, dims, &[0])?.scale_real(1.0 / env as f64);

    let mut out = header(Command::Limits.name(), config);
    let _ = writeln!(out, "scenario = {}", config.scenario.name());
    let _ = writeln!(out, "dim = {}", model.scenario.dim());
    let _ = writeln!(out, "pulses_per_cycle = {}", model.scheme.period());
    let _ = writeln!(out, "cycle_length = {}", model.scheme.cycle_length());
    let _ = writeln!(out, "cycle_is_identity = {}", model.scheme.cycle_is_identity());
    let _ = writeln!(out, "eigenphase_clusters = {clusters}");
    let _ = writeln!(out, "norm_H_eff = {}", num(h_norm));
    let _ = writeln!(out, "norm_B_eff = {}", num(b_norm));
    let _ = writeln!(out, "norm_comm_H_eff_U = {}", num(operator_norm(&u.commutator(h))?));
    let _ = writeln!(out, "norm_comm_B_eff_U = {}", num(operator_norm(&u.commutator(b))?));
    let _ = writeln!(out, "H_eff_zero = {}", h_norm <= ZERO_NORM);
    let _ = writeln!(out, "B_eff_zero = {}", b_norm <= ZERO_NORM);
    let _ = writeln!(out, "norm_H_eff_on_site_0 = {}", num(operator_norm(&protected)?));
    describe(&mut out, "H_eff", h, &model);
    describe(&mut out, "B_eff", b, &model);
    Ok(out)
}

fn gamma_from(config: &ExperimentConfig, gamma_t: f64, t: f64) -> Result<f64, ConfigError> {
    if t > 0.0 {
        Ok(gamma_t / t)
    } else if gamma_t == 0.0 {
        Ok(0.0)
    } else {
        Err(ConfigError::field(
            "sweep.gamma_t",
            None,
            format!("γt = {gamma_t} needs model.t > 0 (model.t = {})", config.t.unwrap_or(0.0)),
        ))
    }
}

fn check_pulse_counts(config: &ExperimentConfig, cycle: usize) -> Result<(), ConfigError> {
    if config.sweep.n.is_empty() {
        return Err(ConfigError::field("sweep.n", None, "at least one pulse count is required"));
    }
    if let Some(bad) = config.sweep.n.iter().find(|&&n| n % cycle != 0) {
        return Err(ConfigError::field(
            "sweep.n",
            None,
            format!("N = {bad} is not a multiple of the cycle length {cycle}"),
        ));
    }
    Ok(())
}

fn gamma_t_values(config: &ExperimentConfig) -> Vec<f64> {
    if config.sweep.gamma_t.is_empty() {
        vec![0.0]
    } else {
        config.sweep.gamma_t.clone()
    }
}

/// Per-trial fidelities of a pulse sweep, one column per (γt, N) grid point.
#[derive(Debug, Clone)]
pub struct SweepData {
    /// (γt, N) for each column, γt-major.
    pub grid: Vec<(f64, usize)>,
    /// `samples[trial][point]`.
    pub samples: Vec<Vec<f64>>,
    pub curve: FidelityCurve,
}

/// Fidelity after N noisy pulses for each (γt, N) of the sweep.
///
/// Trial i draws W_t from stream i once and reuses it across the whole grid.
pub fn sweep_samples(config: &ExperimentConfig) -> Result<SweepData, CliError> {
    if config.scenario == ScenarioKind::Oscillator {
        return Err(ConfigError::field("scenario", None, "sweep-pulses supports two_qubit and spin_bath").into());
    }
    let model = build(config)?;
    let t = config.require_t()?;
    check_pulse_counts(config, model.scheme.cycle_length())?;
    let gammas = gamma_t_values(config);

    let mut noises = Vec::with_capacity(gammas.len());
    for &gt in &gammas {
        noises.push(NoiseModel::new(model.error.clone(), gamma_from(config, gt, t)?)?);
    }
    let mut grid = Vec::new();
    let mut evolutions = Vec::new();
    for (noise, &gt) in noises.iter().zip(&gammas) {
        for &n in &config.sweep.n {
            grid.push((gt, n));
            evolutions.push(FinitePulseEvolution::new(&model.scenario, &model.scheme, noise, t, n)?);
        }
    }
    let psi = model.scenario.reference_cache()?.state(t);
    let seed = config.master_seed;
    let samples = try_map_trials(config.trials, |trial| {
        let w_t = sample_terminal(&mut RngStream::new(seed, trial), t)?;
        evolutions
            .iter()
            .map(|evo| fidelity(&psi, &model.scenario.reduced(&evo.evolve(w_t))?))
            .collect::<ddsim::Result<Vec<f64>>>()
    })?;
    let abscissa = grid.iter().map(|&(_, n)| n as f64).collect();
    let curve = FidelityCurve::from_samples(abscissa, &samples, seed)?;
    Ok(SweepData { grid, samples, curve })
}

pub fn run_sweep_pulses(config: &ExperimentConfig) -> Result<String, CliError> {
    let data = sweep_samples(config)?;
    let curve = &data.curve;
    let mut table = CsvTable::new(&["gamma_t", "N", "mean_fidelity", "std_fidelity", "trials", "seed"]);
    for (k, &(gt, n)) in data.grid.iter().enumerate() {
        table.push(&[
            num(gt),
            n.to_string(),
            num(curve.mean[k]),
            num(curve.std[k]),
            curve.trials.to_string(),
            curve.seed.to_string(),
        ]);
    }
    Ok(table.render(&header(Command::SweepPulses.name(), config)))
}

/// Stream index of the pilot path that fixes the step size.
const PILOT_STREAM: u64 = u64::MAX;

/// Fidelities of continuous-control trajectories and of the averaged evolution.
#[derive(Debug, Clone)]
pub struct TrajectoryData {
    pub times: Vec<f64>,
    pub gamma_t: Vec<f64>,
    /// `samples[trial][point]`.
    pub samples: Vec<Vec<f64>>,
    pub curve: FidelityCurve,
    pub analytic: Vec<f64>,
    /// Split steps per trajectory after refinement.
    pub steps: usize,
}

/// Trajectories under the limit operators ℋ, ℬ next to the averaged master equation.
///
/// A pilot path on its own stream fixes the step count by halving until the
/// recorded fidelities settle; every trial then samples a fresh path at that count.
pub fn trajectory_data(config: &ExperimentConfig) -> Result<TrajectoryData, CliError> {
    let model = build(config)?;
    let t = config.require_t()?;
    let gamma = config.gamma;
    let points = config.sweep.points;
    let limits = scheme_limit(&model.scheme, &model.scenario.hamiltonian, &model.error, tol::CLUSTER)?;
    let (h, b) = (&limits.effective_hamiltonian, &limits.effective_error);
    let rho0 = &model.scenario.rho0;

    let cache = model.scenario.reference_cache()?;
    let times: Vec<f64> = (0..=points).map(|k| t * k as f64 / points as f64).collect();
    let refs: Vec<_> = times.iter().map(|&s| cache.state(s)).collect();
    let scenario = &model.scenario;
    let fidelities = |states: &[ComplexMatrix]| -> ddsim::Result<Vec<f64>> {
        states.iter().zip(&refs).map(|(rho, psi)| fidelity(psi, &scenario.reduced(rho)?)).collect()
    };
    let run_path = |path: &WienerPath| -> ddsim::Result<Vec<f64>> {
        let stride = path.n_steps() / points;
        let traj = SplitStepIntegrator::new(h, b, gamma, path.dt())?.run(rho0, path, stride)?;
        fidelities(&traj.states)
    };

    let initial = (config.sweep.steps_per_unit as f64 * (gamma * t).max(1.0)).ceil() as usize;
    let initial = initial.div_ceil(points).max(1) * points;
    let seed = config.master_seed;
    let steps = if gamma > 0.0 && t > 0.0 && config.sweep.max_halvings > 0 {
        let mut pilot = RngStream::new(seed, PILOT_STREAM);
        let path = sample_path(&mut pilot, t, initial)?;
        let (_, refinement) =
            refine_steps(path, &mut pilot, config.sweep.refine_tol, config.sweep.max_halvings, &run_path)?;
        log::info!(
            "step refinement: {} steps after {} halvings (change {:e})",
            refinement.steps,
            refinement.halvings,
            refinement.change
        );
        refinement.steps
    } else {
        initial
    };

    let samples = try_map_trials(config.trials, |trial| {
        let mut stream = RngStream::new(seed, trial);
        run_path(&sample_path(&mut stream, t, steps)?)
    })?;
    let gamma_t: Vec<f64> = times.iter().map(|&s| gamma * s).collect();
    let curve = FidelityCurve::from_samples(gamma_t.clone(), &samples, seed)?;
    let analytic = fidelities(&averaged_lindblad(h, b, gamma, rho0, t, points)?.states)?;
    Ok(TrajectoryData { times, gamma_t, samples, curve, analytic, steps })
}

pub fn run_trajectories(config: &ExperimentConfig) -> Result<String, CliError> {
    let data = trajectory_data(config)?;
    let curve = &data.curve;
    let mut table = CsvTable::new(&["gamma_t", "mean_F", "std_F", "analytic_F", "single_realization_F"]);
    for k in 0..data.times.len() {
        table.push(&[
            num(data.gamma_t[k]),
            num(curve.mean[k]),
            num(curve.std[k]),
            num(data.analytic[k]),
            num(data.samples[0][k]),
        ]);
    }
    let mut pre = header(Command::Trajectories.name(), config);
    let _ = writeln!(pre, "# steps={} t={}", data.steps, num(config.require_t()?));
    Ok(table.render(&pre))
}

/// Closed-form bound next to the sampled E‖ρ_N − ρ_{N+L}‖ for each (γt, N).
pub fn run_bounds(config: &ExperimentConfig) -> Result<String, CliError> {
    let model = build(config)?;
    let t = config.require_t()?;
    let l = model.scheme.cycle_length();
    check_pulse_counts(config, l)?;
    let gammas = gamma_t_values(config);
    let seed = config.master_seed;

    let mut table = CsvTable::new(&["gamma_t", "N", "bound", "empirical_mean", "empirical_std", "slack"]);
    for &gt in &gammas {
        let gamma = gamma_from(config, gt, t)?;
        let noise = NoiseModel::new(model.error.clone(), gamma)?;
        for &n in &config.sweep.n {
            let inputs = BoundInputs::from_operators(
                &model.scenario.hamiltonian,
                &model.error,
                &model.scenario.rho0,
                gamma,
                t,
                n,
                l,
            )?;
            let bound = match (l, gamma > 0.0) {
                (_, false) => deterministic_cycle_bound(&inputs),
                (2, true) => stochastic_bound_cycle2(&inputs),
                (4, true) => stochastic_bound_cycle4(&inputs),
                (other, true) => {
                    return Err(ConfigError::field(
                        "scheme.pulses",
                        None,
                        format!("noisy bounds need cycle length 2 or 4, found {other}"),
                    )
                    .into())
                }
            };
            let emp = empirical_distance(&model.scenario, &model.scheme, &noise, t, n, config.trials, seed)?;
            table.push(&[num(gt), n.to_string(), num(bound), num(emp.mean), num(emp.std), num(bound - emp.mean)]);
        }
    }
    Ok(table.render(&header(Command::Bounds.name(), config)))
}
