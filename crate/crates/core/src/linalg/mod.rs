//! Dense complex linear algebra.

mod hermitian;
pub mod json;
mod matrix;
mod random;

pub use hermitian::{hermitian_basis, normalize_phase, sum, HermitianMatrix, Spectrum};
pub use matrix::{inner, norm2, outer, pauli, ComplexMatrix, C64, MAX_KRON_DIM};
pub use random::{complex_gaussian_vector, haar_unitary, random_unit_vector, RandomStream};

pub(crate) use matrix::c;

use crate::error::Result;

pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    h.eig()
}

pub fn lambda_max(h: &HermitianMatrix) -> Result<f64> {
    h.lambda_max()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.kron(b)
}

pub fn partial_trace_first(m: &ComplexMatrix, dim_first: usize, dim_second: usize) -> Result<ComplexMatrix> {
    m.partial_trace_first(dim_first, dim_second)
}

pub fn polar_sign(b: &HermitianMatrix) -> Result<ComplexMatrix> {
    b.polar_sign()
}

pub fn trace_norm(b: &HermitianMatrix) -> Result<f64> {
    b.trace_norm()
}

pub fn op_norm(b: &HermitianMatrix) -> Result<f64> {
    b.op_norm()
}

pub fn real_embedding(h: &HermitianMatrix) -> nalgebra::DMatrix<f64> {
    h.real_embedding()
}

/// Random Hermitian matrix with i.i.d. complex Gaussian entries (GUE up to scale).
pub fn random_hermitian(d: usize, rng: &mut RandomStream) -> HermitianMatrix {
    let g = complex_gaussian_vector(d * d, rng);
    HermitianMatrix::new(ComplexMatrix::from_vec(d, d, g).expect("finite sample"))
        .expect("square")
}

/// Random density matrix `GG†/Tr(GG†)` with `G` a square Ginibre matrix.
pub fn random_density(d: usize, rng: &mut RandomStream) -> HermitianMatrix {
    let g = ComplexMatrix::from_vec(d, d, complex_gaussian_vector(d * d, rng)).expect("finite");
    let h = HermitianMatrix::new(g.matmul(&g.adjoint()).expect("square")).expect("square");
    let t = h.trace();
    h.scale(1.0 / t)
}
