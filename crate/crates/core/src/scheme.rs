//! Decoupling cycles, the ergodic projector onto the commutant of the cycle
//! unitary, the continuous-control limits ℋ and ℬ, and the finite-N generator
//! terms H_N, B_N, C_N.
//!
//! Pulses are stored in application order: `pulses[0]` is u_1, the first pulse
//! applied. The partial products are g_0 = I and g_n = u_n ⋯ u_1, so the cycle
//! unitary is U = g_M = u_M ⋯ u_1.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, check_unitary, operator_norm, unitary_eig, ComplexMatrix};
use crate::tol;

/// Highest power of U probed when looking for the closing length.
const MAX_CLOSING_POWER: usize = 64;

#[derive(Debug, Clone)]
pub struct DecouplingScheme {
    dim: usize,
    pulses: Vec<ComplexMatrix>,
    cycle_unitary: ComplexMatrix,
    cycle_is_identity: bool,
    cycle_length: usize,
}

impl DecouplingScheme {
    /// Builds a scheme from one cycle of pulses in application order.
    pub fn new(dim: usize, pulses: Vec<ComplexMatrix>) -> Result<Self> {
        for p in &pulses {
            p.ensure_dim(dim)?;
            check_unitary(p)?;
        }
        let cycle_unitary = pulses.iter().fold(ComplexMatrix::identity(dim), |acc, p| p.matmul(&acc));
        let distance = operator_norm(&(&cycle_unitary - &ComplexMatrix::identity(dim)))?;
        let cycle_is_identity = distance <= tol::CYCLE_IDENTITY;
        let power = closing_power(&cycle_unitary)?;
        let cycle_length = pulses.len().max(1) * power.unwrap_or(1);
        Ok(Self { dim, pulses, cycle_unitary, cycle_is_identity, cycle_length })
    }

    /// The scheme that applies `pulse` at every slot.
    pub fn repeated(pulse: ComplexMatrix) -> Result<Self> {
        Self::new(pulse.dim(), vec![pulse])
    }

    /// No pulses at all; every slot is free evolution.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            pulses: Vec::new(),
            cycle_unitary: ComplexMatrix::identity(dim),
            cycle_is_identity: true,
            cycle_length: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pulses(&self) -> &[ComplexMatrix] {
        &self.pulses
    }

    /// Number of pulses M in one cycle.
    pub fn period(&self) -> usize {
        self.pulses.len()
    }

    pub fn cycle_unitary(&self) -> &ComplexMatrix {
        &self.cycle_unitary
    }

    pub fn cycle_is_identity(&self) -> bool {
        self.cycle_is_identity
    }

    /// Pulses after which the sequence acts as the identity on states, i.e.
    /// M·r for the smallest r with U^r ∝ I. A single σ_z pulse has length 2;
    /// the σx→σz→σx→σz cycle (U = −I) has length 4. Falls back to M when no
    /// such r ≤ 64 exists.
    pub fn cycle_length(&self) -> usize {
        self.cycle_length
    }

    /// Pulse u_n for 1-based slot n, repeating the cycle.
    pub fn pulse_at(&self, slot: usize) -> Option<&ComplexMatrix> {
        if self.pulses.is_empty() {
            None
        } else {
            Some(&self.pulses[(slot - 1) % self.pulses.len()])
        }
    }
}

fn closing_power(u: &ComplexMatrix) -> Result<Option<usize>> {
    let d = u.dim() as f64;
    let mut power = u.clone();
    for r in 1..=MAX_CLOSING_POWER {
        let phase = power.trace() / d;
        if (phase.norm() - 1.0).abs() <= tol::CYCLE_IDENTITY {
            let offset = &power - &ComplexMatrix::identity(u.dim()).scale(phase);
            if operator_norm(&offset)? <= tol::CYCLE_IDENTITY {
                return Ok(Some(r));
            }
        }
        power = power.matmul(u);
    }
    Ok(None)
}

/// g_0 = I, g_n = u_n ⋯ u_1 for n = 1 … M.
pub fn partial_products(scheme: &DecouplingScheme) -> Vec<ComplexMatrix> {
    let mut out = vec![ComplexMatrix::identity(scheme.dim)];
    for p in &scheme.pulses {
        let next = p.matmul(out.last().unwrap());
        out.push(next);
    }
    out
}

/// g_0 … g_{n−1} for the scheme repeated over n slots.
pub fn repeated_products(scheme: &DecouplingScheme, n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n);
    let mut g = ComplexMatrix::identity(scheme.dim);
    for slot in 1..=n {
        let next = match scheme.pulse_at(slot) {
            Some(p) => p.matmul(&g),
            None => g.clone(),
        };
        out.push(std::mem::replace(&mut g, next));
    }
    out
}

/// Orthogonal (Hilbert–Schmidt) projection onto {X : UX = XU}.
///
/// Eigenvalues of U are grouped by eigenphase: adjacent eigenvalues (on the
/// unit circle, including the wrap-around pair) closer than `cluster_tol` are
/// treated as equal. Within each group the eigenvectors are re-orthonormalized
/// and P(X) = Σ_g Π_g X Π_g, evaluated in the eigenbasis by masking the
/// off-group blocks of V†XV.
#[derive(Debug, Clone)]
pub struct ErgodicProjector {
    basis: ComplexMatrix,
    cluster_of: Vec<usize>,
    n_clusters: usize,
}

impl ErgodicProjector {
    pub fn new(u: &ComplexMatrix, cluster_tol: f64) -> Result<Self> {
        if !(cluster_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("cluster tolerance {cluster_tol} must be positive")));
        }
        let eig = unitary_eig(u)?;
        let n = u.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].arg().total_cmp(&eig.eigenvalues[b].arg()).then(a.cmp(&b)));
        let upper = 10.0 * cluster_tol;
        let check_gap = |gap: f64| -> Result<bool> {
            if gap > cluster_tol && gap < upper {
                Err(Error::ClusterAmbiguity { gap, tol: cluster_tol, upper })
            } else {
                Ok(gap <= cluster_tol)
            }
        };
        let mut cluster_of = vec![0usize; n];
        let mut current = 0;
        for w in 1..n {
            let gap = (eig.eigenvalues[order[w]] - eig.eigenvalues[order[w - 1]]).norm();
            if !check_gap(gap)? {
                current += 1;
            }
            cluster_of[order[w]] = current;
        }
        let mut n_clusters = current + 1;
        if n > 1 && n_clusters > 1 {
            let wrap = (eig.eigenvalues[order[n - 1]] - eig.eigenvalues[order[0]]).norm();
            if check_gap(wrap)? {
                for c in cluster_of.iter_mut() {
                    if *c == current {
                        *c = 0;
                    }
                }
                n_clusters -= 1;
            }
        }
        let basis = orthonormalize_clusters(&eig.eigenvectors, &cluster_of, n_clusters);
        Ok(Self { basis, cluster_of, n_clusters })
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    /// Projector Π_g onto the eigenspace of cluster `g`.
    pub fn cluster_projector(&self, g: usize) -> ComplexMatrix {
        let n = self.basis.dim();
        let cols: Vec<usize> = (0..n).filter(|&j| self.cluster_of[j] == g).collect();
        ComplexMatrix::from_fn(n, |i, k| cols.iter().map(|&j| self.basis[(i, j)] * self.basis[(k, j)].conj()).sum())
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.basis.dim();
        x.ensure_dim(n)?;
        let v = &self.basis;
        let mut inner = v.adjoint().matmul(x).matmul(v);
        for i in 0..n {
            for j in 0..n {
                if self.cluster_of[i] != self.cluster_of[j] {
                    inner[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        Ok(v.matmul(&inner).matmul(&v.adjoint()))
    }
}

/// Two passes of modified Gram–Schmidt inside each cluster.
fn orthonormalize_clusters(v: &ComplexMatrix, cluster_of: &[usize], n_clusters: usize) -> ComplexMatrix {
    let n = v.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| v.column(j)).collect();
    for g in 0..n_clusters {
        let members: Vec<usize> = (0..n).filter(|&j| cluster_of[j] == g).collect();
        for _ in 0..2 {
            for (pos, &j) in members.iter().enumerate() {
                for &k in &members[..pos] {
                    let overlap: C64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                    let (head, tail) = cols.split_at_mut(j.max(k));
                    let (target, source) = if j > k { (&mut tail[0], &head[k]) } else { (&mut head[j], &tail[0]) };
                    for (t, s) in target.iter_mut().zip(source.iter()) {
                        *t -= overlap * s;
                    }
                }
                let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in cols[j].iter_mut() {
                    *z /= norm;
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// P(X) for the unitary U.
pub fn ergodic_projector(u: &ComplexMatrix, x: &ComplexMatrix, cluster_tol: f64) -> Result<ComplexMatrix> {
    ErgodicProjector::new(u, cluster_tol)?.apply(x)
}

/// Finite Cesàro mean (1/N) Σ_{k=0}^{N−1} U^k X U^{−k}.
pub fn cesaro_oracle(u: &ComplexMatrix, x: &ComplexMatrix, n: usize) -> ComplexMatrix {
    assert!(n >= 1, "Cesàro mean needs N ≥ 1");
    let u_dag = u.adjoint();
    let mut term = x.clone();
    let mut sum = x.clone();
    for _ in 1..n {
        term = u.matmul(&term).matmul(&u_dag);
        sum += &term;
    }
    sum.scale_real(1.0 / n as f64)
}

/// Continuous-control limits of the Hamiltonian and of the error operator.
#[derive(Debug, Clone)]
pub struct SchemeLimits {
    pub effective_hamiltonian: ComplexMatrix,
    pub effective_error: ComplexMatrix,
}

/// (1/M) Σ_{j=0}^{M−1} g_j X g_j†.
pub fn cycle_average(products: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let m = products.len();
    let mut sum = ComplexMatrix::zeros(x.dim());
    for g in products {
        sum += &g.conjugate(x);
    }
    sum.scale_real(1.0 / m as f64)
}

/// ℋ = P((1/M) Σ g_j H g_j†) and ℬ likewise; P is skipped when the cycle closes to I.
pub fn scheme_limit(
    scheme: &DecouplingScheme,
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    cluster_tol: f64,
) -> Result<SchemeLimits> {
    for op in [h, b] {
        op.ensure_dim(scheme.dim)?;
        check_hermitian(op)?;
    }
    let mut products = partial_products(scheme);
    products.pop();
    if products.is_empty() {
        products.push(ComplexMatrix::identity(scheme.dim));
    }
    let h_avg = cycle_average(&products, h);
    let b_avg = cycle_average(&products, b);
    let (effective_hamiltonian, effective_error) = if scheme.cycle_is_identity {
        (h_avg, b_avg)
    } else {
        let projector = ErgodicProjector::new(&scheme.cycle_unitary, cluster_tol)?;
        (projector.apply(&h_avg)?, projector.apply(&b_avg)?)
    };
    Ok(SchemeLimits {
        effective_hamiltonian: effective_hamiltonian.hermitian_part(),
        effective_error: effective_error.hermitian_part(),
    })
}

/// Generator terms of the N-pulse evolution at τ → 0.
#[derive(Debug, Clone)]
pub struct GeneratorTerms {
    pub hamiltonian: ComplexMatrix,
    pub error: ComplexMatrix,
    pub second_order: ComplexMatrix,
}

/// H_N = (1/N) Σ g_k H g_k†, B_N = (1/N) Σ g_k B g_k†,
/// C_N = (1/N²) Σ_k g_k B² g_k† + (2/N²) Σ_{j<k} (g_j B g_j†)(g_k B g_k†).
pub fn finite_generator_terms(
    products: &[ComplexMatrix],
    h: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<GeneratorTerms> {
    let n = products.len();
    if n == 0 {
        return Err(Error::InvalidArgument("generator terms need at least one product".into()));
    }
    let dim = h.dim();
    b.ensure_dim(dim)?;
    let mut h_sum = ComplexMatrix::zeros(dim);
    let mut b_sum = ComplexMatrix::zeros(dim);
    let mut squares = ComplexMatrix::zeros(dim);
    let mut cross = ComplexMatrix::zeros(dim);
    for g in products {
        g.ensure_dim(dim)?;
        h_sum += &g.conjugate(h);
        let x = g.conjugate(b);
        squares += &x.matmul(&x);
        // b_sum holds Σ_{j<k} X_j at this point.
        cross += &b_sum.matmul(&x);
        b_sum += &x;
    }
    let nf = n as f64;
    let second_order = &squares.scale_real(1.0 / (nf * nf)) + &cross.scale_real(2.0 / (nf * nf));
    Ok(GeneratorTerms { hamiltonian: h_sum.scale_real(1.0 / nf), error: b_sum.scale_real(1.0 / nf), second_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_hermitian, random_matrix, random_unitary};
    use crate::operators::{pauli, tensor, Axis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z1() -> ComplexMatrix {
        tensor(&[pauli(Axis::Z), ComplexMatrix::identity(2)]).unwrap()
    }

    #[test]
    fn partial_products_single_pulse() {
        let s = DecouplingScheme::repeated(z1()).unwrap();
        let g = partial_products(&s);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0], ComplexMatrix::identity(4));
        assert_eq!(g[1], z1());
        assert_eq!(s.cycle_length(), 2);
        assert!(!s.cycle_is_identity());
        assert_eq!(partial_products(&DecouplingScheme::identity(3)), vec![ComplexMatrix::identity(3)]);
    }

    #[test]
    fn cycle_product_is_in_application_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pulses: Vec<_> = (0..3).map(|_| random_unitary(3, &mut rng)).collect();
        let s = DecouplingScheme::new(3, pulses.clone()).unwrap();
        let expected = pulses[2].matmul(&pulses[1]).matmul(&pulses[0]);
        assert!((s.cycle_unitary() - &expected).max_abs() < 1e-14);
        for g in partial_products(&s) {
            assert!(crate::linalg::unitarity_residual(&g) < 1e-10);
        }
        assert_eq!(s.cycle_length(), 3);
    }

    #[test]
    fn four_pulse_cycle_closes_up_to_phase() {
        let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
        let s = DecouplingScheme::new(2, vec![x.clone(), z.clone(), x, z]).unwrap();
        assert!(!s.cycle_is_identity());
        assert!((s.cycle_unitary() + &ComplexMatrix::identity(2)).max_abs() < 1e-15);
        assert_eq!(s.cycle_length(), 4);
    }

    #[test]
    fn rejects_non_unitary_pulses() {
        let bad = ComplexMatrix::identity(2).scale_real(2.0);
        assert!(matches!(DecouplingScheme::repeated(bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn projector_sigma_y_example() {
        // U = σy; P(2a₀I + 2aₓσx) = 2a₀I.
        let x = &ComplexMatrix::identity(2).scale_real(2.0) + &pauli(Axis::X).scale_real(2.0);
        let p = ergodic_projector(&pauli(Axis::Y), &x, tol::CLUSTER).unwrap();
        assert!((&p - &ComplexMatrix::identity(2).scale_real(2.0)).max_abs() < 1e-14);
    }

    #[test]
    fn projector_with_identity_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_matrix(4, &mut rng);
        let p = ergodic_projector(&ComplexMatrix::identity(4), &x, tol::CLUSTER).unwrap();
        assert!((&p - &x).max_abs() < 1e-13);
    }

    #[test]
    fn projector_is_idempotent_and_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_unitary(4, &mut rng);
            let proj = ErgodicProjector::new(&u, tol::CLUSTER).unwrap();
            let x = random_matrix(4, &mut rng);
            let px = proj.apply(&x).unwrap();
            assert!(operator_norm(&(&proj.apply(&px).unwrap() - &px)).unwrap() < 1e-10);
            assert!(operator_norm(&u.commutator(&px)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn projector_handles_wraparound_cluster() {
        // Eigenphases just either side of π must merge into one cluster.
        let eps = 1e-12;
        let u = ComplexMatrix::diagonal(&[
            C64::from_polar(1.0, std::f64::consts::PI - eps),
            C64::from_polar(1.0, -std::f64::consts::PI + eps),
            C64::new(1.0, 0.0),
        ]);
        let proj = ErgodicProjector::new(&u, 1e-8).unwrap();
        assert_eq!(proj.n_clusters(), 2);
    }

    #[test]
    fn ambiguous_gap_is_reported() {
        let u = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::from_polar(1.0, 5e-8)]);
        assert!(matches!(ErgodicProjector::new(&u, 1e-8), Err(Error::ClusterAmbiguity { .. })));
    }

    #[test]
    fn cesaro_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_matrix(3, &mut rng);
        let u = random_unitary(3, &mut rng);
        assert_eq!(cesaro_oracle(&u, &x, 1), x);
        assert!((&cesaro_oracle(&ComplexMatrix::identity(3), &x, 17) - &x).max_abs() < 1e-14);
    }

    #[test]
    fn cesaro_converges_like_one_over_n_on_the_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(4, &mut rng);
        let y = random_matrix(4, &mut rng);
        // Z = Y − U Y U† lies in Ran(I − 𝒰): its mean is (Y − U^N Y U^{−N})/N.
        let z = &y - &u.conjugate(&y);
        let bound = 2.0 * y.frobenius_norm();
        for n in [10, 100, 1000] {
            let mean = cesaro_oracle(&u, &z, n);
            assert!(mean.frobenius_norm() <= bound / n as f64 + 1e-12);
        }
    }

    #[test]
    fn two_qubit_limits() {
        let (w, g) = (1.0, 0.1);
        let id = ComplexMatrix::identity(2);
        let free = &tensor(&[pauli(Axis::Z), id.clone()]).unwrap() + &tensor(&[id.clone(), pauli(Axis::Z)]).unwrap();
        let h = &free.scale_real(w / 2.0) + &tensor(&[pauli(Axis::X), pauli(Axis::X)]).unwrap().scale_real(g);
        let b2 = crate::operators::site_operator(crate::operators::PauliCoefficients::new(1.0, 1.0, 1.0, 1.0));
        let b1 = crate::operators::site_operator(crate::operators::PauliCoefficients::new(1.0, 0.7, -0.3, 0.5));
        let b = b1.kron(&b2);
        let s = DecouplingScheme::repeated(z1()).unwrap();
        let lim = scheme_limit(&s, &h, &b, tol::CLUSTER).unwrap();
        assert!((&lim.effective_hamiltonian - &free.scale_real(w / 2.0)).max_abs() < 1e-12);
        let surviving =
            crate::operators::site_operator(crate::operators::PauliCoefficients::new(1.0, 0.0, 0.0, 0.5)).kron(&b2);
        assert!((&lim.effective_error - &surviving).max_abs() < 1e-12);

        // The same limit through the explicit 2-cycle, where P is skipped.
        let two = DecouplingScheme::new(4, vec![z1(), z1()]).unwrap();
        assert!(two.cycle_is_identity());
        let lim2 = scheme_limit(&two, &h, &b, tol::CLUSTER).unwrap();
        assert!((&lim2.effective_hamiltonian - &lim.effective_hamiltonian).max_abs() < 1e-14);
    }

    #[test]
    fn pulse_order_is_irrelevant_for_two_pulse_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
        let xz = DecouplingScheme::new(2, vec![x.clone(), z.clone(), x.clone(), z.clone()]).unwrap();
        let zx = DecouplingScheme::new(2, vec![z.clone(), x.clone(), z, x]).unwrap();
        let l1 = scheme_limit(&xz, &a, &b, tol::CLUSTER).unwrap();
        let l2 = scheme_limit(&zx, &a, &b, tol::CLUSTER).unwrap();
        assert!((&l1.effective_hamiltonian - &l2.effective_hamiltonian).max_abs() < 1e-10);
        let trace_part = ComplexMatrix::identity(2).scale(a.trace() / 2.0);
        assert!((&l1.effective_hamiltonian - &trace_part).max_abs() < 1e-12);
    }

    #[test]
    fn generator_terms_single_slot() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let t = finite_generator_terms(&[ComplexMatrix::identity(3)], &h, &b).unwrap();
        assert!((&t.hamiltonian - &h).max_abs() < 1e-15);
        assert!((&t.error - &b).max_abs() < 1e-15);
        assert!((&t.second_order - &b.matmul(&b)).max_abs() < 1e-14);
    }

    #[test]
    fn generator_terms_symmetric_part_is_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pulses = vec![random_unitary(4, &mut rng), random_unitary(4, &mut rng)];
        let s = DecouplingScheme::new(4, pulses).unwrap();
        let h = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        for n in [2, 8, 32] {
            let t = finite_generator_terms(&repeated_products(&s, n), &h, &b).unwrap();
            let sym = (&t.second_order + &t.second_order.adjoint()).scale_real(0.5);
            assert!(operator_norm(&(&sym - &t.error.matmul(&t.error))).unwrap() < 1e-10);
        }
    }

    #[test]
    fn repeated_two_cycle_generator_matches_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let s = DecouplingScheme::new(4, vec![z1(), z1()]).unwrap();
        let lim = scheme_limit(&s, &h, &b, tol::CLUSTER).unwrap();
        let h_norm = operator_norm(&h).unwrap();
        for l in [1, 10, 100] {
            let t = finite_generator_terms(&repeated_products(&s, 2 * l), &h, &b).unwrap();
            let diff = operator_norm(&(&t.hamiltonian - &lim.effective_hamiltonian)).unwrap();
            assert!(diff <= 2.0 * h_norm / l as f64);
        }
    }
}
