use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, hermitian_eig, hermitian_eig_unchecked, ComplexMatrix, EigenDecomposition};
use crate::metrics::fidelity;
use crate::operators::partial_trace;
use crate::tol;

/// Checks Hermiticity, unit trace and the eigenvalue floor.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    check_hermitian(rho).map_err(|e| Error::InvalidState(e.to_string()))?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol::TRACE || trace.im.abs() > tol::TRACE {
        return Err(Error::InvalidState(format!("trace {trace} is not 1")));
    }
    let lowest = hermitian_eig(rho)?.real_eigenvalues()[0];
    if lowest < tol::PSD_FLOOR {
        return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
    }
    Ok(())
}

/// Error operator B and noise strength γ of the pulse imperfection.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    b: ComplexMatrix,
    gamma: f64,
    eig: EigenDecomposition,
}

impl NoiseModel {
    pub fn new(b: ComplexMatrix, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("noise strength γ = {gamma} must be finite and ≥ 0")));
        }
        let eig = hermitian_eig(&b)?;
        Ok(Self { b, gamma, eig })
    }

    pub fn noiseless(dim: usize) -> Self {
        Self::new(ComplexMatrix::zeros(dim), 0.0).expect("zero operator is Hermitian")
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("noise strength γ = {gamma} must be finite and ≥ 0")));
        }
        Ok(Self { gamma, ..self.clone() })
    }

    /// e^{−i√γ B w}.
    pub fn pulse_factor(&self, w: f64) -> ComplexMatrix {
        let s = self.gamma.sqrt() * w;
        if s == 0.0 {
            return ComplexMatrix::identity(self.dim());
        }
        self.eig.apply(|l| C64::new(0.0, -l.re * s).exp())
    }

    /// e^{−(γ/2) B² t}.
    pub fn mean_factor(&self, t: f64) -> ComplexMatrix {
        let g = self.gamma;
        self.eig.apply(|l| C64::new((-0.5 * g * l.re * l.re * t).exp(), 0.0))
    }
}

/// A physical setup: Hamiltonian, initial state, register layout and the
/// ideal evolution of the protected subsystem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub hamiltonian: ComplexMatrix,
    pub rho0: ComplexMatrix,
    pub site_dims: Vec<usize>,
    /// 0-based sites whose reduced state is compared with the reference.
    pub protected_sites: Vec<usize>,
    /// Generator of the ideal reference evolution on the protected sites.
    pub ideal_generator: ComplexMatrix,
    /// Reference pure state at t = 0 on the protected sites.
    pub reference: Vec<C64>,
    pub label: String,
}

impl Scenario {
    pub fn new(
        label: impl Into<String>,
        hamiltonian: ComplexMatrix,
        rho0: ComplexMatrix,
        site_dims: Vec<usize>,
        protected_sites: Vec<usize>,
        ideal_generator: ComplexMatrix,
        reference: Vec<C64>,
    ) -> Result<Self> {
        let total: usize = site_dims.iter().product();
        hamiltonian.ensure_dim(total)?;
        check_hermitian(&hamiltonian)?;
        rho0.ensure_dim(total)?;
        validate_density(&rho0)?;
        if protected_sites.is_empty() || protected_sites.iter().any(|&s| s >= site_dims.len()) {
            return Err(Error::InvalidArgument(format!("protected sites {protected_sites:?} do not fit the register")));
        }
        let mut protected_sites = protected_sites;
        protected_sites.sort_unstable();
        protected_sites.dedup();
        let sub: usize = protected_sites.iter().map(|&s| site_dims[s]).product();
        ideal_generator.ensure_dim(sub)?;
        check_hermitian(&ideal_generator)?;
        if reference.len() != sub {
            return Err(Error::DimensionMismatch { expected: sub, found: reference.len() });
        }
        let norm = reference.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("reference state has norm {norm}")));
        }
        Ok(Self { hamiltonian, rho0, site_dims, protected_sites, ideal_generator, reference, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn reduced(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.protected_sites.len() == self.site_dims.len() {
            rho.ensure_dim(self.dim())?;
            return Ok(rho.clone());
        }
        partial_trace(rho, &self.site_dims, &self.protected_sites)
    }

    /// Fidelity of the full state `rho` against the reference at time `t`.
    pub fn fidelity_at(&self, rho: &ComplexMatrix, t: f64) -> Result<f64> {
        let psi = super::ideal_reference(self, t)?;
        fidelity(&psi, &self.reduced(rho)?)
    }

    /// Reference evaluator with the ideal propagator's eigendecomposition cached.
    pub fn reference_cache(&self) -> Result<ReferenceCache> {
        Ok(ReferenceCache { eig: hermitian_eig_unchecked(&self.ideal_generator)?, psi0: self.reference.clone() })
    }
}

/// e^{−iGt}|Ψ(0)⟩ for many t from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    eig: EigenDecomposition,
    psi0: Vec<C64>,
}

impl ReferenceCache {
    pub fn state(&self, t: f64) -> Vec<C64> {
        self.eig.apply(|l| C64::new(0.0, -l.re * t).exp()).matvec(&self.psi0)
    }
}

/// Wiener values that drove a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerRecord {
    /// (master seed, stream index) when the path came from an `RngStream`.
    pub seed: Option<(u64, u64)>,
    /// W at each recorded abscissa.
    pub values: Vec<f64>,
}

/// States sampled along an evolution.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    /// Times or pulse counts.
    pub abscissa: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub wiener: Option<WienerRecord>,
}

impl TrajectoryResult {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&ComplexMatrix> {
        self.states.last()
    }
}
