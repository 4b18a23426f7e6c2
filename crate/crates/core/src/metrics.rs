//! Fidelity against a pure reference, ensemble statistics and operator-norm distances.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::tol;

/// F = √⟨ψ|ρ|ψ⟩.
pub fn fidelity(psi: &[C64], rho: &ComplexMatrix) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: psi.len() });
    }
    let overlap = rho.sandwich(psi, psi).re;
    if overlap < 0.0 {
        if overlap >= -tol::FIDELITY_CLAMP {
            return Ok(0.0);
        }
        return Err(Error::InvalidState(format!("⟨ψ|ρ|ψ⟩ = {overlap:e} is negative")));
    }
    Ok(overlap.sqrt())
}

/// Mean and population standard deviation (1/M normalization).
pub fn ensemble_stats(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    // Shifting by the first sample keeps constant ensembles exactly constant.
    let m = samples.len() as f64;
    let shift = samples[0];
    let offset = samples.iter().map(|x| x - shift).sum::<f64>() / m;
    let var = samples.iter().map(|x| (x - shift - offset).powi(2)).sum::<f64>() / m;
    Ok((shift + offset, var.sqrt()))
}

/// ‖ρ1 − ρ2‖_op.
pub fn opnorm_distance(rho1: &ComplexMatrix, rho2: &ComplexMatrix) -> Result<f64> {
    rho2.ensure_dim(rho1.dim())?;
    operator_norm(&(rho1 - rho2))
}

/// Mean fidelity with its spread along a sweep of γt values or pulse counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub abscissa: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl FidelityCurve {
    /// Builds the curve from per-trial samples, `samples[trial][point]`.
    pub fn from_samples(abscissa: Vec<f64>, samples: &[Vec<f64>], seed: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let mut mean = Vec::with_capacity(abscissa.len());
        let mut std = Vec::with_capacity(abscissa.len());
        let mut column = Vec::with_capacity(samples.len());
        for p in 0..abscissa.len() {
            column.clear();
            for trial in samples {
                if trial.len() != abscissa.len() {
                    return Err(Error::DimensionMismatch { expected: abscissa.len(), found: trial.len() });
                }
                column.push(trial[p]);
            }
            let (m, s) = ensemble_stats(&column)?;
            mean.push(m);
            std.push(s);
        }
        Ok(Self { abscissa, mean, std, trials: samples.len(), seed })
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    /// Standard error of the mean at each point.
    pub fn standard_error(&self) -> Vec<f64> {
        let root = (self.trials as f64).sqrt();
        self.std.iter().map(|s| s / root).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_state, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(entries: &[f64]) -> Vec<C64> {
        entries.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn fidelity_examples() {
        let psi = ket(&[0.6, 0.8]);
        assert!((fidelity(&psi, &ComplexMatrix::outer(&psi)).unwrap() - 1.0).abs() < 1e-15);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((fidelity(&psi, &mixed).unwrap() - 0.5_f64.sqrt()).abs() < 1e-15);
        let orth = ket(&[0.8, -0.6]);
        assert!(fidelity(&orth, &ComplexMatrix::outer(&psi)).unwrap() < 1e-8);
        assert!(matches!(fidelity(&ket(&[1.0]), &mixed), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fidelity_clamps_only_rounding_noise() {
        let psi = ket(&[1.0, 0.0]);
        let jitter = ComplexMatrix::real_diagonal(&[-1e-12, 1.0]);
        assert_eq!(fidelity(&psi, &jitter).unwrap(), 0.0);
        let bad = ComplexMatrix::real_diagonal(&[-1e-3, 1.0]);
        assert!(matches!(fidelity(&psi, &bad), Err(Error::InvalidState(_))));
    }

    #[test]
    fn fidelity_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let psi = random_state(4, &mut rng);
            let rho = random_density(4, &mut rng);
            let v = random_unitary(4, &mut rng);
            let a = fidelity(&psi, &rho).unwrap();
            let b = fidelity(&v.matvec(&psi), &v.conjugate(&rho)).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn stats_examples() {
        assert_eq!(ensemble_stats(&[0.3; 5]).unwrap(), (0.3, 0.0));
        assert_eq!(ensemble_stats(&[0.1 + 0.2; 40]).unwrap(), (0.1 + 0.2, 0.0));
        assert_eq!(ensemble_stats(&[0.0, 1.0]).unwrap(), (0.5, 0.5));
        assert_eq!(ensemble_stats(&[]), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn distance_examples() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let b = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        assert_eq!(opnorm_distance(&a, &a).unwrap(), 0.0);
        assert!((opnorm_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        assert!(opnorm_distance(&a, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn curve_from_samples() {
        let samples = vec![vec![1.0, 0.5], vec![1.0, 0.7], vec![1.0, 0.9]];
        let c = FidelityCurve::from_samples(vec![0.0, 1.0], &samples, 9).unwrap();
        assert_eq!(c.mean[0], 1.0);
        assert_eq!(c.std[0], 0.0);
        assert!((c.mean[1] - 0.7).abs() < 1e-15);
        assert!((c.std[1] - (0.08_f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(c.trials, 3);
    }
}
