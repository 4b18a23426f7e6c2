//! Closed-form bounds on the distance between states reached with N and N+L
//! pulses, and the Monte Carlo estimate of that distance.

use crate::dynamics::{FinitePulseEvolution, NoiseModel, Scenario};
use crate::ensemble::try_map_trials;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::metrics::{ensemble_stats, opnorm_distance};
use crate::scheme::DecouplingScheme;
use crate::stochastic::{correlated_pair_lagged, RngStream};

/// The stochastic bounds assume t/N³ ≪ 1; above this a warning is raised.
pub const REGIME_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub h_norm: f64,
    pub b_norm: f64,
    pub rho_norm: f64,
    pub gamma: f64,
    pub t: f64,
    pub n: usize,
    /// Cycle length L.
    pub l: usize,
}

impl BoundInputs {
    pub fn new(h_norm: f64, b_norm: f64, rho_norm: f64, gamma: f64, t: f64, n: usize, l: usize) -> Result<Self> {
        for (name, v) in [("‖H‖", h_norm), ("‖B‖", b_norm), ("‖ρ‖", rho_norm), ("γ", gamma)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be finite and ≥ 0")));
            }
        }
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if n == 0 || l == 0 {
            return Err(Error::InvalidArgument("N and L must be at least 1".into()));
        }
        Ok(Self { h_norm, b_norm, rho_norm, gamma, t, n, l })
    }

    /// Norms taken from the operators themselves.
    pub fn from_operators(
        h: &ComplexMatrix,
        b: &ComplexMatrix,
        rho: &ComplexMatrix,
        gamma: f64,
        t: f64,
        n: usize,
        l: usize,
    ) -> Result<Self> {
        Self::new(operator_norm(h)?, operator_norm(b)?, operator_norm(rho)?, gamma, t, n, l)
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }
}

/// Raised when t/N³ exceeds [`REGIME_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeWarning {
    pub ratio: f64,
    pub threshold: f64,
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t/N³ = {:e} exceeds {:e}; the stochastic bound may not apply", self.ratio, self.threshold)
    }
}

pub fn regime_warning(input: &BoundInputs) -> Option<RegimeWarning> {
    let ratio = input.t / input.nf().powi(3);
    (ratio > REGIME_THRESHOLD).then_some(RegimeWarning { ratio, threshold: REGIME_THRESHOLD })
}

/// ‖ρ‖(e^{2L‖H‖t/N} − 1) + L‖ρ‖(e^{2‖H‖t/N} − 1).
pub fn deterministic_cycle_bound(input: &BoundInputs) -> f64 {
    let l = input.l as f64;
    let x = 2.0 * input.h_norm * input.t / input.nf();
    input.rho_norm * ((l * x).exp_m1() + l * x.exp_m1())
}

/// Deterministic bound with L = 1 plus the pulse term ‖ρ_N − u_{N+1} ρ_N u_{N+1}†‖.
pub fn single_step_bound(input: &BoundInputs, pulse_term: f64) -> f64 {
    deterministic_cycle_bound(&BoundInputs { l: 1, ..*input }) + pulse_term
}

/// ‖ρ‖(e^{2L‖H‖t/N} + L·e^{2[‖H‖/N + 2γ‖B‖²/(N+L)²]t} + e^{2L√(γt(N+1))‖B‖/(N+L)} − L − 2),
/// written as a sum of expm1 terms.
fn stochastic_bound(input: &BoundInputs, l: usize) -> f64 {
    if let Some(w) = regime_warning(input) {
        log::warn!("{w}");
    }
    let (n, lf) = (input.nf(), l as f64);
    let (h, b, g, t) = (input.h_norm, input.b_norm, input.gamma, input.t);
    let shifted = n + lf;
    let first = (2.0 * lf * h * t / n).exp_m1();
    let second = (2.0 * (h / n + 2.0 * g * b * b / (shifted * shifted)) * t).exp_m1();
    let third = (2.0 * lf * (g * t * (n + 1.0)).sqrt() * b / shifted).exp_m1();
    input.rho_norm * (first + lf * second + third)
}

/// Bound on E‖ρ_N − ρ_{N+2}‖ for two-pulse cycles.
pub fn stochastic_bound_cycle2(input: &BoundInputs) -> f64 {
    stochastic_bound(input, 2)
}

/// Bound on E‖ρ_N − ρ_{N+4}‖ for four-pulse cycles.
pub fn stochastic_bound_cycle4(input: &BoundInputs) -> f64 {
    stochastic_bound(input, 4)
}

/// Monte Carlo estimate of E‖ρ_N − ρ_{N+L}‖ with its spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalDistance {
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

impl EmpiricalDistance {
    pub fn standard_error(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }
}

/// Samples ‖ρ_N(t) − ρ_{N+L}(t)‖_op with L the scheme's cycle length.
///
/// Within a trial the per-pulse arguments W_{t/N²} and W_{t/(N+L)²} come from
/// one Wiener path, so the two runs see coupled noise. Trial i uses stream i
/// of `seed`.
pub fn empirical_distance(
    scenario: &Scenario,
    scheme: &DecouplingScheme,
    noise: &NoiseModel,
    t: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalDistance> {
    if trials == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let l = scheme.cycle_length();
    let near = FinitePulseEvolution::new(scenario, scheme, noise, t, n)?;
    let far = FinitePulseEvolution::new(scenario, scheme, noise, t, n + l)?;
    let samples = try_map_trials(trials, |trial| {
        let mut stream = RngStream::new(seed, trial);
        let (w_near, w_far) = correlated_pair_lagged(&mut stream, t, n, l)?;
        opnorm_distance(&near.evolve_with_pulse_value(w_near), &far.evolve_with_pulse_value(w_far))
    })?;
    let (mean, std) = ensemble_stats(&samples)?;
    Ok(EmpiricalDistance { mean, std, trials })
}
