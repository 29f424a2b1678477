//! Hermitian matrices and the complex Jacobi eigensolver.

use std::ops::{Add, Sub};

use nalgebra::DMatrix;

use super::matrix::{c, ComplexMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Dense complex self-adjoint matrix, symmetrized as `(H + H†)/2` on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

/// Eigen-decomposition with eigenvalues sorted in descending order; column `k`
/// of `eigenvectors` belongs to `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        });
        HermitianMatrix::new(m).expect("spectral map of finite data")
    }
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = m.rows();
        let h = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(Self(h))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn diag(diag: &[f64]) -> Self {
        Self(ComplexMatrix::diag_real(diag))
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(n, n, entries)?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `M H M†` for any conformable `M`.
    pub fn congruence(&self, m: &ComplexMatrix) -> Result<Self> {
        Self::new(m.matmul(&self.0)?.matmul(&m.adjoint())?)
    }

    /// `U† H U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(u.adjoint().matmul(&self.0)?.matmul(u)?)
    }

    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        Ok(Self(self.0.kron(&rhs.0)?))
    }

    /// Real part of `Tr(self · rhs)`, i.e. the Hilbert–Schmidt inner product.
    pub fn inner(&self, rhs: &Self) -> Result<f64> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {}- and {}-dimensional matrices",
                self.dim(),
                rhs.dim()
            )));
        }
        Ok(self
            .0
            .as_slice()
            .iter()
            .zip(rhs.0.transpose().as_slice())
            .map(|(a, b)| (a * b).re)
            .sum())
    }

    pub fn eig(&self) -> Result<Spectrum> {
        jacobi(&self.0)
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues.first().copied().unwrap_or(0.0))
    }

    pub fn lambda_min(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues.last().copied().unwrap_or(0.0))
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eig()?.eigenvalues.iter().map(|l| l.abs()).sum())
    }

    pub fn op_norm(&self) -> Result<f64> {
        Ok(self
            .eig()?
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max))
    }

    /// `U sign(Λ) U†` with `sign(0) = +1`.
    pub fn polar_sign(&self) -> Result<ComplexMatrix> {
        Ok(self
            .eig()?
            .map(|l| if l < 0.0 { -1.0 } else { 1.0 })
            .into_matrix())
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.lambda_min()? >= -tol)
    }

    /// Square root of the positive part.
    pub fn sqrt_psd(&self) -> Result<Self> {
        Ok(self.eig()?.map(|l| l.max(0.0).sqrt()))
    }

    /// `[[Re H, −Im H], [Im H, Re H]]`.
    pub fn real_embedding(&self) -> DMatrix<f64> {
        let n = self.dim();
        let h = &self.0;
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let z = h[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    }

    /// Entrywise distance to `rhs` in the max-modulus norm.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        (&self.0 - &rhs.0).max_abs()
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

/// Sum of a nonempty list of equally-sized Hermitian matrices.
pub fn sum<'a>(dim: usize, terms: impl IntoIterator<Item = &'a HermitianMatrix>) -> HermitianMatrix {
    terms
        .into_iter()
        .fold(HermitianMatrix::zeros(dim), |acc, t| &acc + t)
}

/// Orthonormal basis of the real space of `n×n` Hermitian matrices under the
/// trace inner product: `E_kk`, `(E_kl+E_lk)/√2`, `i(E_kl−E_lk)/√2`.
pub fn hermitian_basis(n: usize) -> Vec<HermitianMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(k, k)] = c(1.0, 0.0);
        out.push(HermitianMatrix(m));
    }
    for k in 0..n {
        for l in k + 1..n {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(k, l)] = c(r, 0.0);
            m[(l, k)] = c(r, 0.0);
            out.push(HermitianMatrix(m));
            let mut m = ComplexMatrix::zeros(n, n);
            m[(k, l)] = c(0.0, -r);
            m[(l, k)] = c(0.0, r);
            out.push(HermitianMatrix(m));
        }
    }
    out
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// Cyclic complex Jacobi. Each rotation is a phase change making a_pq real
// followed by the classical real rotation, so J = diag(1, e^{-iφ}) R.
fn jacobi(h: &ComplexMatrix) -> Result<Spectrum> {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        return Ok(finish(a, v));
    }
    let tol = 1e-15 * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            // Roundoff can stall slightly above the target; anything this small
            // is still far inside the residual contract.
            if off <= 1e-11 * scale {
                break;
            }
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let gamma = a[(p, q)];
                let mag = gamma.norm();
                if mag <= 1e-300 || mag <= 1e-18 * scale {
                    a[(p, q)] = c(0.0, 0.0);
                    a[(q, p)] = c(0.0, 0.0);
                    continue;
                }
                let phase = gamma / mag; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let ph = phase.conj();
                let j_pp = c(cs, 0.0);
                let j_pq = c(sn, 0.0);
                let j_qp = ph * (-sn);
                let j_qq = ph * cs;
                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }
    Ok(finish(a, v))
}

fn finish(a: ComplexMatrix, v: ComplexMatrix) -> Spectrum {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Returns the unit vector `e^{-iθ} v` whose largest-modulus entry is real
/// positive; fixes the phase ambiguity of eigenvectors.
pub fn normalize_phase(v: &mut [C64]) {
    if let Some(big) = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
    {
        if big.norm() > 0.0 {
            let ph = (big / big.norm()).conj();
            for z in v.iter_mut() {
                *z *= ph;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::pauli;

    #[test]
    fn diagonal_spectrum() {
        let s = HermitianMatrix::diag(&[2.0, -1.0]).eig().unwrap();
        assert_eq!(s.eigenvalues, vec![2.0, -1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let [x, _, _] = pauli();
        let s = HermitianMatrix::new(x).unwrap().eig().unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_max_examples() {
        let [x, _, z] = pauli();
        let h = HermitianMatrix::new(&x + &z).unwrap();
        assert!((h.lambda_max().unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(HermitianMatrix::identity(4).lambda_max().unwrap(), 1.0);
        assert_eq!(HermitianMatrix::identity(3).scale(-1.0).lambda_max().unwrap(), -1.0);
    }

    #[test]
    fn construction_symmetrizes() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.3), c(1.0, 1.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(h.matrix()[(0, 1)], c(0.5, 0.5));
        assert_eq!(h.matrix()[(1, 0)], c(0.5, -0.5));
    }

    #[test]
    fn rejects_rectangular() {
        assert!(matches!(
            HermitianMatrix::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn polar_sign_examples() {
        let p = HermitianMatrix::diag(&[2.0, -3.0]).polar_sign().unwrap();
        assert!((&p - &ComplexMatrix::diag_real(&[1.0, -1.0])).max_abs() < 1e-15);
        let p = HermitianMatrix::diag(&[0.0, 0.0]).polar_sign().unwrap();
        assert_eq!(p, ComplexMatrix::identity(2));
    }

    #[test]
    fn norms_of_diag() {
        let h = HermitianMatrix::diag(&[1.0, -1.0]);
        assert_eq!(h.trace_norm().unwrap(), 2.0);
        assert_eq!(h.op_norm().unwrap(), 1.0);
        let [x, _, _] = pauli();
        let h = HermitianMatrix::new(x.scale_real(std::f64::consts::FRAC_1_SQRT_2)).unwrap();
        assert!((h.op_norm().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn embedding_of_real_is_block_diagonal() {
        let h = HermitianMatrix::from_real(2, &[1.0, 2.0, 2.0, -3.0]).unwrap();
        let e = h.real_embedding();
        assert_eq!(e[(0, 1)], 2.0);
        assert_eq!(e[(2, 3)], 2.0);
        assert_eq!(e[(3, 3)], -3.0);
        assert_eq!(e[(0, 2)], 0.0);
        assert_eq!(e[(1, 2)], 0.0);
    }

    #[test]
    fn embedding_of_sigma_y() {
        let [_, y, _] = pauli();
        let e = HermitianMatrix::new(y).unwrap().real_embedding();
        let mut ev: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = hermitian_basis(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = x.inner(y).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-15);
            }
        }
    }
}
