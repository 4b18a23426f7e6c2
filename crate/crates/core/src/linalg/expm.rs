//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13, selected from the 1-norm.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA_13: f64 = 5.371920351148152;
/// Inputs needing more squarings than this are rejected.
const MAX_SQUARINGS: u32 = 64;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn axpy_identity(m: &mut ComplexMatrix, c: f64) {
    for i in 0..m.dim() {
        m[(i, i)] += C64::new(c, 0.0);
    }
}

fn lincomb(terms: &[(f64, &ComplexMatrix)], dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim);
    for (c, m) in terms {
        for (o, x) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *o += x * *c;
        }
    }
    out
}

/// Odd and even parts (U, V) of the degree-m Padé numerator for m ≤ 9.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let a2 = a.matmul(a);
    let mut powers = vec![ComplexMatrix::identity(n), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap().matmul(&a2);
        powers.push(next);
    }
    let mut u_inner = ComplexMatrix::zeros(n);
    let mut v = ComplexMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u_inner += &p.scale_real(b[2 * k + 1]);
        }
        v += &p.scale_real(b[2 * k]);
    }
    (a.matmul(&u_inner), v)
}

fn pade_13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let b = &B13;
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let hi_u = a6.matmul(&lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n));
    let mut u_inner = &hi_u + &lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], n);
    axpy_identity(&mut u_inner, b[1]);
    let hi_v = a6.matmul(&lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n));
    let mut v = &hi_v + &lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], n);
    axpy_identity(&mut v, b[0]);
    (a.matmul(&u_inner), v)
}

/// Solves (V − U) X = V + U.
fn pade_solve(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let denom = (v - u).to_nalgebra();
    let numer = (v + u).to_nalgebra();
    let x = denom.lu().solve(&numer).ok_or(Error::NoConvergence)?;
    Ok(ComplexMatrix::from_nalgebra(&x))
}

/// e^A for a general square matrix.
pub fn expm_general(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = a.one_norm();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(a.dim()));
    }
    for (m, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, b);
            return pade_solve(&u, &v);
        }
    }
    let squarings = (norm / THETA_13).log2().ceil().max(0.0) as u32;
    if squarings > MAX_SQUARINGS {
        return Err(Error::Overflow { norm, squarings });
    }
    let scaled = a.scale_real(0.5_f64.powi(squarings as i32));
    let (u, v) = pade_13(&scaled);
    let mut x = pade_solve(&u, &v)?;
    for _ in 0..squarings {
        x = x.matmul(&x);
    }
    if !x.is_finite() {
        return Err(Error::Overflow { norm, squarings });
    }
    Ok(x)
}
