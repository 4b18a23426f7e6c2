use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Square dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries; the length must be a perfect square.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::InvalidArgument(format!("{} entries do not form a square matrix", entries.len())));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(*x, 0.0);
        }
        m
    }

    /// Rank-one projector |ψ⟩⟨ψ|.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `self · x · self†`.
    pub fn conjugate(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matvec dimension mismatch");
        (0..self.dim).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// ⟨u|A|v⟩.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.matvec(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Kronecker product with `self` as the left (slower-varying) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * d + j * m + l] = a * rhs.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum (induced 1-norm of the transpose, i.e. ∞-norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        (0..n).map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hilbert–Schmidt inner product Tr(self† · rhs).
    pub fn hs_inner(&self, rhs: &Self) -> C64 {
        assert_eq!(self.dim, rhs.dim);
        self.data.iter().zip(&rhs.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_fn(n, |i, j| m[(i, j)])
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.data[i * self.dim + j]).collect()
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found: self.dim })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim, rhs.dim, "dimension mismatch");
                ComplexMatrix {
                    dim: self.dim,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                &self $op &rhs
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.matmul(&rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pow_matches_repeated_products() {
        let a = ComplexMatrix::from_rows(&[&[c(0.3, 0.1), c(-0.2, 0.5)], &[c(0.7, 0.0), c(0.1, -0.4)]]);
        let mut expected = ComplexMatrix::identity(2);
        for k in 0..13u64 {
            assert!((&a.pow(k) - &expected).max_abs() < 1e-14, "k = {k}");
            expected = expected.matmul(&a);
        }
        assert_eq!(a.pow(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn double_adjoint_is_exact() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 + 0.3, j as f64 - 1.7));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn kron_layout_puts_left_factor_outermost() {
        let z = ComplexMatrix::real_diagonal(&[-1.0, 1.0]);
        let id = ComplexMatrix::identity(2);
        let zi = z.kron(&id);
        let diag: Vec<f64> = (0..4).map(|i| zi[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn matmul_matches_definition() {
        let a = ComplexMatrix::from_fn(3, |i, j| c((i * 3 + j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, |i, j| c(1.0, (i + 2 * j) as f64));
        let p = a.matmul(&b);
        for i in 0..3 {
            for j in 0..3 {
                let expected: C64 = (0..3).map(|k| a[(i, k)] * b[(k, j)]).sum();
                assert!((p[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn from_row_major_rejects_non_square() {
        assert!(ComplexMatrix::from_row_major(vec![c(1.0, 0.0); 3]).is_err());
        assert_eq!(ComplexMatrix::from_row_major(vec![c(f64::NAN, 0.0); 4]), Err(Error::NonFinite));
    }
}
