//! Pauli and bosonic operator constructors, tensor products and partial traces.
//!
//! Basis order per qubit is (|0⟩, |1⟩) with σ_z = |1⟩⟨1| − |0⟩⟨0|, so |0⟩ is
//! the −1 eigenstate. Site 0 is the leftmost tensor factor. ℏ = 1.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Largest register handled by the spin-bath builder (2^6 = 64).
pub const MAX_SPIN_BATH_SITES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" => Some(Axis::I),
            "X" => Some(Axis::X),
            "Y" => Some(Axis::Y),
            "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

/// The 2×2 Pauli matrix for `axis`. Satisfies σ_xσ_y − σ_yσ_x = 2iσ_z in this basis.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::I => ComplexMatrix::identity(2),
        Axis::X => ComplexMatrix::from_rows(&[&[o, one], &[one, o]]),
        Axis::Y => ComplexMatrix::from_rows(&[&[o, i], &[-i, o]]),
        Axis::Z => ComplexMatrix::from_rows(&[&[-one, o], &[o, one]]),
    }
}

/// Real coefficients of c0·I + cx·σx + cy·σy + cz·σz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PauliCoefficients {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl PauliCoefficients {
    pub const fn new(c0: f64, cx: f64, cy: f64, cz: f64) -> Self {
        Self { c0, cx, cy, cz }
    }

    pub const fn axis(axis: Axis) -> Self {
        match axis {
            Axis::I => Self::new(1.0, 0.0, 0.0, 0.0),
            Axis::X => Self::new(0.0, 1.0, 0.0, 0.0),
            Axis::Y => Self::new(0.0, 0.0, 1.0, 0.0),
            Axis::Z => Self::new(0.0, 0.0, 0.0, 1.0),
        }
    }
}

pub fn site_operator(c: PauliCoefficients) -> ComplexMatrix {
    let mut m = pauli(Axis::I).scale_real(c.c0);
    m += &pauli(Axis::X).scale_real(c.cx);
    m += &pauli(Axis::Y).scale_real(c.cy);
    m += &pauli(Axis::Z).scale_real(c.cz);
    m
}

/// Kronecker product in list order.
pub fn tensor(ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyList)?;
    Ok(rest.iter().fold(first.clone(), |acc, op| acc.kron(op)))
}

/// A register of finite-dimensional sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitRegister {
    dims: Vec<usize>,
}

impl QubitRegister {
    pub fn qubits(n_sites: usize) -> Result<Self> {
        Self::with_dims(vec![2; n_sites])
    }

    pub fn with_dims(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("register needs at least one non-empty site".into()));
        }
        Ok(Self { dims })
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `op` on `site`, identity elsewhere.
    pub fn embed(&self, op: &ComplexMatrix, site: usize) -> Result<ComplexMatrix> {
        self.embed_many(&[(site, op)])
    }

    /// Product of single-site operators, identity on unlisted sites.
    pub fn embed_many(&self, ops: &[(usize, &ComplexMatrix)]) -> Result<ComplexMatrix> {
        let mut factors: Vec<ComplexMatrix> = self.dims.iter().map(|&d| ComplexMatrix::identity(d)).collect();
        for &(site, op) in ops {
            let slot = factors.get_mut(site).ok_or_else(|| {
                Error::InvalidArgument(format!("site {site} outside a {}-site register", self.dims.len()))
            })?;
            op.ensure_dim(slot.dim())?;
            *slot = slot.matmul(op);
        }
        tensor(&factors)
    }
}

/// Central-spin hyperfine Hamiltonian on K+1 qubits, site 0 being the central spin:
/// Σ_k A_k (σx⁽⁰⁾σx⁽ᵏ⁾ + σy⁽⁰⁾σy⁽ᵏ⁾ + σz⁽⁰⁾σz⁽ᵏ⁾) + Σ_k (ω_k/2) σz⁽ᵏ⁾.
///
/// `omegas` has K+1 entries (central spin first), `couplings` has K.
pub fn spin_bath_hamiltonian(k: usize, omegas: &[f64], couplings: &[f64]) -> Result<ComplexMatrix> {
    let n_sites = k + 1;
    if n_sites > MAX_SPIN_BATH_SITES {
        return Err(Error::DimensionTooLarge { dim: 1 << n_sites, cap: 1 << MAX_SPIN_BATH_SITES });
    }
    if omegas.len() != n_sites {
        return Err(Error::DimensionMismatch { expected: n_sites, found: omegas.len() });
    }
    if couplings.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: couplings.len() });
    }
    let reg = QubitRegister::qubits(n_sites)?;
    let mut h = ComplexMatrix::zeros(reg.total_dim());
    for (site, &w) in omegas.iter().enumerate() {
        h += &reg.embed(&pauli(Axis::Z), site)?.scale_real(w / 2.0);
    }
    for (nucleus, &a) in couplings.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let p = pauli(axis);
            h += &reg.embed_many(&[(0, &p), (nucleus + 1, &p)])?.scale_real(a);
        }
    }
    Ok(h)
}

/// Hyperfine couplings A_k = ω·exp[−(k/5)^{1/3}] for nuclei labelled k = 2, …, K+1
/// (the central spin carries label 1).
pub fn hyperfine_profile(k: usize, omega: f64) -> Vec<f64> {
    (2..=k + 1).map(|label| omega * (-(label as f64 / 5.0).cbrt()).exp()).collect()
}

/// Fock-space cutoff for one bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BosonicSpace {
    dim: usize,
}

impl BosonicSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("Fock truncation {dim} < 2")));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Truncated annihilation and creation operators, a|n⟩ = √n |n−1⟩.
pub fn boson_ladder(space: BosonicSpace) -> (ComplexMatrix, ComplexMatrix) {
    let d = space.dim;
    let a = ComplexMatrix::from_fn(
        d,
        |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    );
    let a_dag = a.adjoint();
    (a, a_dag)
}

pub fn number_operator(space: BosonicSpace) -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&(0..space.dim).map(|n| n as f64).collect::<Vec<_>>())
}

/// e^{iφ a†a} on the truncated mode, φ ∈ (0, π]. φ = π is the parity operator.
pub fn parity_phase_pulse(space: BosonicSpace, phi: f64) -> Result<ComplexMatrix> {
    if !(phi > 0.0 && phi <= std::f64::consts::PI) {
        return Err(Error::PhiOutOfRange { phi });
    }
    let phases: Vec<C64> = (0..space.dim)
        .map(|n| {
            if phi == std::f64::consts::PI {
                // Exact ±1 keeps the parity pulse an exact involution.
                C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                C64::from_polar(1.0, phi * n as f64)
            }
        })
        .collect();
    Ok(ComplexMatrix::diagonal(&phases))
}

/// Truncated coherent state |α⟩ on `space`, renormalized after the cutoff.
pub fn coherent_state(space: BosonicSpace, alpha: C64) -> Vec<C64> {
    let mut amp = Vec::with_capacity(space.dim);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..space.dim {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        amp.push(term);
    }
    let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amp.into_iter().map(|z| z / norm).collect()
}

/// Largest population found in the two highest Fock levels of a mode state.
pub fn fock_leakage(rho: &ComplexMatrix) -> f64 {
    let d = rho.dim();
    (d.saturating_sub(2)..d).map(|n| rho[(n, n)].re).fold(0.0, f64::max)
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Traces out every site not listed in `keep` (0-based site indices).
///
/// The kept sites appear in the reduced operator in their original order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    rho.ensure_dim(total)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::InvalidArgument(format!("site {bad} outside a {}-site register", dims.len())));
    }
    if kept.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one site".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !kept.contains(s)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&s| dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    // Full index for (kept multi-index, traced multi-index).
    let mut strides = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let offsets = |sites: &[usize], sub_dims: &[usize], count: usize, buf: &mut Vec<usize>| -> Vec<usize> {
        (0..count)
            .map(|idx| {
                buf.resize(sub_dims.len(), 0);
                digits(idx, sub_dims, buf);
                sites.iter().zip(buf.iter()).map(|(&s, &d)| d * strides[s]).sum()
            })
            .collect()
    };
    let mut buf = Vec::new();
    let kept_off = offsets(&kept, &kept_dims, kept_total, &mut buf);
    let traced_off = offsets(&traced, &traced_dims, traced_total, &mut buf);

    let mut out = ComplexMatrix::zeros(kept_total);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| rho[(ro + t, co + t)]).sum();
        }
    }
    Ok(out)
}
