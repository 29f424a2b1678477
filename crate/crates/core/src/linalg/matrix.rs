//! Dense row-major complex matrices.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest dimension product accepted by [`ComplexMatrix::kron`].
pub const MAX_KRON_DIM: usize = 1 << 12;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, re: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, re.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn diag_real(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = c(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let rows = self
            .rows
            .checked_mul(rhs.rows)
            .filter(|&r| r <= MAX_KRON_DIM);
        let cols = self
            .cols
            .checked_mul(rhs.cols)
            .filter(|&r| r <= MAX_KRON_DIM);
        let (Some(rows), Some(cols)) = (rows, cols) else {
            return Err(Error::DimensionOverflow(format!(
                "kron of {}x{} and {}x{} exceeds {MAX_KRON_DIM}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        };
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_bipartite(&self, dim_first: usize, dim_second: usize) -> Result<usize> {
        let n = dim_first
            .checked_mul(dim_second)
            .ok_or_else(|| Error::DimensionOverflow("partial trace dimensions".into()))?;
        if self.rows != n || self.cols != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not on C^{dim_first} ⊗ C^{dim_second}",
                self.rows, self.cols
            )));
        }
        Ok(n)
    }

    /// Traces out the first tensor factor of an operator on `C^dim_first ⊗ C^dim_second`.
    pub fn partial_trace_first(&self, dim_first: usize, dim_second: usize) -> Result<Self> {
        self.check_bipartite(dim_first, dim_second)?;
        let mut out = Self::zeros(dim_second, dim_second);
        for a in 0..dim_first {
            for i in 0..dim_second {
                for j in 0..dim_second {
                    out[(i, j)] += self[(a * dim_second + i, a * dim_second + j)];
                }
            }
        }
        Ok(out)
    }

    /// Traces out the second tensor factor.
    pub fn partial_trace_second(&self, dim_first: usize, dim_second: usize) -> Result<Self> {
        self.check_bipartite(dim_first, dim_second)?;
        let mut out = Self::zeros(dim_first, dim_first);
        for i in 0..dim_first {
            for j in 0..dim_first {
                let mut s = c(0.0, 0.0);
                for b in 0..dim_second {
                    s += self[(i * dim_second + b, j * dim_second + b)];
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }

    /// Restriction to the index window `[r0, r0+rows) x [c0, c0+cols)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Operator (spectral) norm via the largest eigenvalue of `M†M`.
    pub fn op_norm(&self) -> Result<f64> {
        let gram = crate::linalg::HermitianMatrix::new(self.adjoint().matmul(self)?)?;
        Ok(gram.lambda_max()?.max(0.0).sqrt())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "matrix shapes differ"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; use `matmul` for a fallible product.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes differ")
    }
}

/// Pauli matrices `(σ_X, σ_Y, σ_Z)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::from_vec(2, 2, vec![z, one, one, z]).unwrap(),
        ComplexMatrix::from_vec(2, 2, vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::from_vec(2, 2, vec![one, z, z, -one]).unwrap(),
    ]
}

/// Standard inner product `⟨u, v⟩`, antilinear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Outer product `u v†`.
pub fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = ComplexMatrix::identity(2)
            .kron(&ComplexMatrix::identity(3))
            .unwrap();
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_zz_is_diagonal() {
        let [_, _, z] = pauli();
        let k = z.kron(&z).unwrap();
        assert_eq!(k, ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_overflow_guard() {
        let big = ComplexMatrix::zeros(100, 1);
        assert!(matches!(
            big.kron(&big),
            Err(Error::DimensionOverflow(_))
        ));
    }

    #[test]
    fn partial_trace_of_identity() {
        let (g, d) = (3, 2);
        let m = ComplexMatrix::identity(2 * g * d);
        let t = m.partial_trace_first(2 * g, d).unwrap();
        assert_eq!(t, ComplexMatrix::identity(d).scale_real((2 * g) as f64));
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(5);
        assert!(m.partial_trace_first(2, 2).is_err());
    }

    #[test]
    fn from_vec_rejects_nan() {
        assert_eq!(
            ComplexMatrix::from_real(1, 1, &[f64::NAN]),
            Err(Error::NonFinite)
        );
    }
}
