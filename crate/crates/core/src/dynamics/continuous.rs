use num_complex::Complex64 as C64;

use super::{TrajectoryResult, WienerRecord};
use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, expm_hermitian_generator, hermitian_eig, ComplexMatrix};
use crate::stochastic::{RngStream, WienerPath};

/// Split-step integrator for one realization of the limit dynamics,
/// V = e^{−iℋdt} e^{−i√γ ℬ ΔW} per step.
///
/// The state is kept in the eigenbasis of ℬ, where the noise factor is a
/// diagonal phase and only the free step needs matrix products.
#[derive(Debug, Clone)]
pub struct SplitStepIntegrator {
    basis: ComplexMatrix,
    eigenvalues: Vec<f64>,
    sqrt_gamma: f64,
    free_in_basis: ComplexMatrix,
    dt: f64,
}

impl SplitStepIntegrator {
    pub fn new(h: &ComplexMatrix, b: &ComplexMatrix, gamma: f64, dt: f64) -> Result<Self> {
        check_hermitian(h)?;
        b.ensure_dim(h.dim())?;
        if !(gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise strength γ = {gamma} must be ≥ 0")));
        }
        let eig = hermitian_eig(b)?;
        let basis = eig.eigenvectors.clone();
        let free = expm_hermitian_generator(h, dt)?;
        let free_in_basis = basis.adjoint().matmul(&free).matmul(&basis);
        Ok(Self { eigenvalues: eig.real_eigenvalues(), basis, sqrt_gamma: gamma.sqrt(), free_in_basis, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn to_basis(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.basis.adjoint().matmul(rho).matmul(&self.basis)
    }

    fn out_of_basis(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.basis.conjugate(rho)
    }

    fn step(&self, rho: &mut ComplexMatrix, dw: f64) {
        let s = self.sqrt_gamma * dw;
        if s != 0.0 {
            let n = rho.dim();
            let phases: Vec<C64> = self.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -s * l)).collect();
            for i in 0..n {
                for j in 0..n {
                    rho[(i, j)] *= phases[i] * phases[j].conj();
                }
            }
        }
        *rho = self.free_in_basis.conjugate(rho);
    }

    /// Runs along `path`, recording every `stride` steps (and at t = 0).
    pub fn run(&self, rho0: &ComplexMatrix, path: &WienerPath, stride: usize) -> Result<TrajectoryResult> {
        rho0.ensure_dim(self.basis.dim())?;
        if stride == 0 || !path.n_steps().is_multiple_of(stride) {
            return Err(Error::InvalidArgument(format!(
                "record stride {stride} does not divide {} steps",
                path.n_steps()
            )));
        }
        if (path.dt() - self.dt).abs() > 1e-12 * self.dt.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "path step {} differs from integrator step {}",
                path.dt(),
                self.dt
            )));
        }
        let n_records = path.n_steps() / stride + 1;
        let mut abscissa = Vec::with_capacity(n_records);
        let mut states = Vec::with_capacity(n_records);
        let mut values = Vec::with_capacity(n_records);
        let mut rho = self.to_basis(rho0);
        let mut w = 0.0;
        abscissa.push(0.0);
        states.push(rho0.clone());
        values.push(0.0);
        for (k, &dw) in path.increments.iter().enumerate() {
            self.step(&mut rho, dw);
            w += dw;
            if (k + 1) % stride == 0 {
                abscissa.push((k + 1) as f64 * self.dt);
                states.push(self.out_of_basis(&rho).hermitian_part());
                values.push(w);
            }
        }
        Ok(TrajectoryResult { abscissa, states, wiener: Some(WienerRecord { seed: None, values }) })
    }
}

/// One realization of the limit dynamics along `path`, recording every step.
pub fn continuous_trajectory(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    gamma: f64,
    rho0: &ComplexMatrix,
    path: &WienerPath,
) -> Result<TrajectoryResult> {
    continuous_trajectory_strided(h, b, gamma, rho0, path, 1)
}

pub fn continuous_trajectory_strided(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    gamma: f64,
    rho0: &ComplexMatrix,
    path: &WienerPath,
    stride: usize,
) -> Result<TrajectoryResult> {
    SplitStepIntegrator::new(h, b, gamma, path.dt())?.run(rho0, path, stride)
}

/// Outcome of step-halving refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRefinement {
    /// Step count of the accepted (finer) path.
    pub steps: usize,
    /// Largest change of the observable at the last halving.
    pub change: f64,
    pub halvings: usize,
    pub converged: bool,
}

/// Halves the step of `path` (Brownian-bridge refinement) until the observable
/// changes by less than `tol`, or `max_halvings` is reached.
///
/// Returns the accepted path, on which the observable was last evaluated.
pub fn refine_steps(
    path: WienerPath,
    stream: &mut RngStream,
    tol: f64,
    max_halvings: usize,
    mut observe: impl FnMut(&WienerPath) -> Result<Vec<f64>>,
) -> Result<(WienerPath, StepRefinement)> {
    let mut current = path;
    let mut previous = observe(&current)?;
    let mut change = f64::INFINITY;
    for halving in 1..=max_halvings {
        let finer = current.refine(stream)?;
        let next = observe(&finer)?;
        change = previous.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        current = finer;
        previous = next;
        if change < tol {
            let steps = current.n_steps();
            return Ok((current, StepRefinement { steps, change, halvings: halving, converged: true }));
        }
    }
    log::warn!("step refinement stopped after {max_halvings} halvings with change {change:e}");
    let steps = current.n_steps();
    Ok((current, StepRefinement { steps, change, halvings: max_halvings, converged: false }))
}
