//! Random test matrices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_matrix(dim, rng).hermitian_part()
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of R's diagonal removed.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng).to_nalgebra();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<C64> = (0..dim)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    let fixed = DMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    ComplexMatrix::from_nalgebra(&fixed)
}

/// Random full-rank density matrix G·G† / Tr(G·G†).
pub fn random_density(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    let rho = g.matmul(&g.adjoint()).hermitian_part();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Random normalized pure state.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}
