use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;

/// Sparse symmetric block matrix. Each entry `(block, i, j, v)` with `i <= j`
/// stands for `v` at both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymBlockMatrix {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SymBlockMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, block: usize, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            self.entries.push((block, i, j, v));
        }
    }

    /// Adds the upper triangle of a dense symmetric matrix at `offset` inside `block`.
    pub fn add_dense(&mut self, block: usize, offset: usize, m: &DMatrix<f64>, scale: f64) {
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                self.add(block, offset + i, offset + j, scale * m[(i, j)]);
            }
        }
    }

    /// Adds `scale · embed(H)/2`, so that against an embedded variable `Y` the
    /// term contributes `scale · Tr(H G)` for the complex matrix `G` encoded by `Y`.
    pub fn add_hermitian(&mut self, block: usize, h: &HermitianMatrix, scale: f64) {
        let n = h.dim();
        let m = h.matrix();
        let s = 0.5 * scale;
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                if i <= j {
                    self.add(block, i, j, s * z.re);
                    self.add(block, n + i, n + j, s * z.re);
                }
                // upper-right entry (j, n+i) of the embedding is −Im H_ji = Im H_ij
                self.add(block, j, n + i, s * z.im);
            }
        }
    }

    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    /// Sorts and merges duplicate positions, dropping exact zeros.
    pub fn canonicalize(&mut self) {
        self.entries.sort_by_key(|e| (e.0, e.1, e.2));
        let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &(b, i, j, v) in &self.entries {
            match out.last_mut() {
                Some(last) if (last.0, last.1, last.2) == (b, i, j) => last.3 += v,
                _ => out.push((b, i, j, v)),
            }
        }
        out.retain(|e| e.3 != 0.0);
        self.entries = out;
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(b, i, j, v)| (b, i, j, c * v)).collect(),
        }
    }

    /// Trace inner product with a block-diagonal dense matrix.
    pub fn dot(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, i, j, v)| {
                if i == j {
                    v * x[b][(i, i)]
                } else {
                    v * (x[b][(i, j)] + x[b][(j, i)])
                }
            })
            .sum()
    }

    /// Trace inner product of two canonical matrices.
    fn dot_sparse(&self, rhs: &Self) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut s = 0.0;
        let (x, y) = (&self.entries, &rhs.entries);
        while a < x.len() && b < y.len() {
            let ka = (x[a].0, x[a].1, x[a].2);
            let kb = (y[b].0, y[b].1, y[b].2);
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    let w = if ka.1 == ka.2 { 1.0 } else { 2.0 };
                    s += w * x[a].3 * y[b].3;
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }

    pub fn to_dense(&self, block_dims: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        self.add_to(&mut out, 1.0);
        out
    }

    pub(crate) fn add_to(&self, out: &mut [DMatrix<f64>], c: f64) {
        for &(b, i, j, v) in &self.entries {
            out[b][(i, j)] += c * v;
            if i != j {
                out[b][(j, i)] += c * v;
            }
        }
    }
}

/// `min ⟨C, X⟩  s.t.  ⟨A_j, X⟩ = b_j,  X ⪰ 0` over a block-diagonal cone.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    objective: SymBlockMatrix,
    constraints: Vec<SymBlockMatrix>,
    rhs: Vec<f64>,
}

impl SdpProblem {
    /// Validates shapes, finiteness and linear independence of the constraints.
    pub fn new(
        block_dims: Vec<usize>,
        mut objective: SymBlockMatrix,
        mut constraints: Vec<SymBlockMatrix>,
        rhs: Vec<f64>,
    ) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidArgument("blocks must be nonempty".into()));
        }
        if constraints.len() != rhs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} constraints but {} right-hand sides",
                constraints.len(),
                rhs.len()
            )));
        }
        if rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        for m in std::iter::once(&mut objective).chain(constraints.iter_mut()) {
            m.canonicalize();
            for &(b, i, j, v) in m.entries() {
                if b >= block_dims.len() || j >= block_dims[b] {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({b}, {i}, {j}) outside the block structure"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
        }
        let p = Self {
            block_dims,
            objective,
            constraints,
            rhs,
        };
        p.check_rank()?;
        Ok(p)
    }

    fn check_rank(&self) -> Result<()> {
        let m = self.constraints.len();
        if m == 0 {
            return Ok(());
        }
        // Normalize each row so the test is scale-free.
        let norms: Vec<f64> = self
            .constraints
            .iter()
            .map(|a| a.dot_sparse(a).sqrt())
            .collect();
        if let Some(&n) = norms.iter().find(|&&n| n == 0.0) {
            return Err(Error::RankDeficient { min_eigenvalue: n });
        }
        let gram = DMatrix::from_fn(m, m, |i, j| {
            self.constraints[i].dot_sparse(&self.constraints[j]) / (norms[i] * norms[j])
        });
        let ev = gram.symmetric_eigenvalues();
        let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= 1e-10 {
            return Err(Error::RankDeficient { min_eigenvalue: min });
        }
        Ok(())
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn objective(&self) -> &SymBlockMatrix {
        &self.objective
    }

    pub fn constraints(&self) -> &[SymBlockMatrix] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Total cone dimension `Σ n_b`.
    pub fn order(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// `A(X)`.
    pub fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|a| a.dot(x)))
    }

    /// `Aᵀ y`.
    pub fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = self.zero_blocks();
        for (a, &yi) in self.constraints.iter().zip(y.iter()) {
            a.add_to(&mut out, yi);
        }
        out
    }

    pub fn zero_blocks(&self) -> Vec<DMatrix<f64>> {
        self.block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }

    /// Same problem with `(A_j, b_j)` replaced by `(c_j A_j, c_j b_j)`.
    pub fn rescale_rows(&self, c: &[f64]) -> Result<Self> {
        Self::new(
            self.block_dims.clone(),
            self.objective.clone(),
            self.constraints.iter().zip(c).map(|(a, &s)| a.scaled(s)).collect(),
            self.rhs.iter().zip(c).map(|(b, s)| b * s).collect(),
        )
    }

    pub fn to_json(&self) -> SdpProblemJson {
        let dense = |m: &SymBlockMatrix| -> Vec<Vec<Vec<f64>>> {
            m.to_dense(&self.block_dims)
                .iter()
                .map(|b| b.row_iter().map(|r| r.iter().copied().collect()).collect())
                .collect()
        };
        SdpProblemJson {
            block_dims: self.block_dims.clone(),
            objective: dense(&self.objective),
            constraints: self.constraints.iter().map(dense).collect(),
            rhs: self.rhs.clone(),
        }
    }

    pub fn from_json(j: &SdpProblemJson) -> Result<Self> {
        let sparse = |blocks: &[Vec<Vec<f64>>]| -> Result<SymBlockMatrix> {
            if blocks.len() != j.block_dims.len() {
                return Err(Error::DimensionMismatch("block count".into()));
            }
            let mut m = SymBlockMatrix::new();
            for (b, (rows, &n)) in blocks.iter().zip(&j.block_dims).enumerate() {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch(format!("block {b} is not {n}x{n}")));
                }
                for i in 0..n {
                    for k in i..n {
                        m.add(b, i, k, 0.5 * (rows[i][k] + rows[k][i]));
                    }
                }
            }
            Ok(m)
        };
        Self::new(
            j.block_dims.clone(),
            sparse(&j.objective)?,
            j.constraints.iter().map(|c| sparse(c)).collect::<Result<_>>()?,
            j.rhs.clone(),
        )
    }
}

/// Dense debugging form of an [`SdpProblem`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpProblemJson {
    pub block_dims: Vec<usize>,
    pub objective: Vec<Vec<Vec<f64>>>,
    pub constraints: Vec<Vec<Vec<Vec<f64>>>>,
    pub rhs: Vec<f64>,
}

/// Complex Hermitian matrix encoded by a real `2n × 2n` embedded block:
/// `G = (Y11 + Y22)/2 + i (Y21 − Y12)/2`.
pub fn decode_hermitian(y: &DMatrix<f64>) -> HermitianMatrix {
    let n = y.nrows() / 2;
    let m = crate::linalg::ComplexMatrix::from_fn(n, n, |i, j| {
        crate::linalg::c(
            0.5 * (y[(i, j)] + y[(n + i, n + j)]),
            0.5 * (y[(n + i, j)] - y[(i, n + j)]),
        )
    });
    HermitianMatrix::new(m).expect("finite block")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn hermitian_term_matches_embedding_inner_product() {
        let [x, y, z] = pauli();
        let h = HermitianMatrix::new(&(&x + &y.scale_real(0.3)) + &z).unwrap();
        let g = HermitianMatrix::new(&y + &z.scale_real(2.0)).unwrap();
        let mut m = SymBlockMatrix::new();
        m.add_hermitian(0, &h, 1.0);
        m.canonicalize();
        let val = m.dot(&[g.real_embedding()]);
        assert!((val - h.inner(&g).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn decode_inverts_embedding() {
        let [_, y, z] = pauli();
        let g = HermitianMatrix::new(&y + &z).unwrap();
        let back = decode_hermitian(&g.real_embedding());
        assert!(back.max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn rank_deficiency_rejected() {
        let mut a = SymBlockMatrix::new();
        a.add(0, 0, 0, 1.0);
        let b = a.scaled(2.0);
        let r = SdpProblem::new(vec![2], SymBlockMatrix::new(), vec![a, b], vec![1.0, 2.0]);
        assert!(matches!(r, Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn out_of_range_entry_rejected() {
        let mut a = SymBlockMatrix::new();
        a.add(0, 0, 3, 1.0);
        assert!(SdpProblem::new(vec![2], SymBlockMatrix::new(), vec![a], vec![1.0]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut a = SymBlockMatrix::new();
        a.add(0, 0, 1, 1.5);
        a.add(1, 0, 0, -1.0);
        let mut c = SymBlockMatrix::new();
        c.add(0, 0, 0, 1.0);
        let p = SdpProblem::new(vec![2, 1], c, vec![a], vec![0.25]).unwrap();
        let s = serde_json::to_string(&p.to_json()).unwrap();
        let q = SdpProblem::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(q.constraints(), p.constraints());
        assert_eq!(q.objective(), p.objective());
    }
}
