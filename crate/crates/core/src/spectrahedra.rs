//! Free spectrahedra: the matrix cube and diamond, non-monic normalization and
//! the cube-inclusion SDP.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::json::MatrixJson;
use crate::linalg::{hermitian_basis, ComplexMatrix, HermitianMatrix};
use crate::sdp::{self, decode_hermitian, SdpProblem, Settings, Status, SymBlockMatrix};

/// Default slack for membership and vertex tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Largest `g` for which `2^g` sign vectors are enumerated.
pub const MAX_SIGN_ENUMERATION: usize = 24;
/// Largest `2g·d` accepted by [`cube_inclusion`].
pub const INCLUSION_BUDGET: usize = 64;

const INTERIOR_DELTA: f64 = 1e-6;
const SUPPORT_THRESHOLD: f64 = 1e-9;

/// `(A_0; A_1, …, A_g)` defining `D_A(n) = {X : Σ A_i ⊗ X_i ⪯ A_0 ⊗ I_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrahedronTuple {
    pub g: usize,
    pub d: usize,
    pub a0: HermitianMatrix,
    pub a: Vec<HermitianMatrix>,
    pub monic: bool,
}

impl SpectrahedronTuple {
    pub fn new(a0: HermitianMatrix, a: Vec<HermitianMatrix>) -> Result<Self> {
        let d = a0.dim();
        if let Some(m) = a.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "tuple matrix of dimension {} with A0 of dimension {d}",
                m.dim()
            )));
        }
        let monic = a0.max_abs_diff(&HermitianMatrix::identity(d)) <= 1e-12;
        Ok(Self {
            g: a.len(),
            d,
            a0,
            a,
            monic,
        })
    }

    pub fn monic(a: Vec<HermitianMatrix>) -> Result<Self> {
        let d = a
            .first()
            .map(|m| m.dim())
            .ok_or_else(|| Error::InvalidArgument("empty tuple needs an explicit dimension".into()))?;
        Self::new(HermitianMatrix::identity(d), a)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a.iter().map(|m| m.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// Whether the scalar point `x ∈ R^g` lies in `D_A(1)`.
    pub fn level1_contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_len(x.len(), self.g)?;
        let mut s = self.a0.scale(-1.0);
        for (m, &xi) in self.a.iter().zip(x) {
            s = &s + &m.scale(xi);
        }
        Ok(s.lambda_max()? <= tol)
    }

    /// Whether the tuple `X` lies in `D_A(n)`.
    pub fn contains(&self, x: &MatrixTuplePoint, tol: f64) -> Result<bool> {
        check_len(x.x.len(), self.g)?;
        let n = x.n;
        let mut s = self.a0.kron(&HermitianMatrix::identity(n))?.scale(-1.0);
        for (a, xi) in self.a.iter().zip(&x.x) {
            s = &s + &a.kron(xi)?;
        }
        Ok(s.lambda_max()? <= tol)
    }

    pub fn to_json(&self) -> TupleJson {
        TupleJson {
            g: self.g,
            d: self.d,
            a0: MatrixJson::from_hermitian(&self.a0),
            a: self.a.iter().map(MatrixJson::from_hermitian).collect(),
            monic: self.monic,
        }
    }

    pub fn from_json(j: &TupleJson) -> Result<Self> {
        let a: Vec<HermitianMatrix> = j.a.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?;
        let t = Self::new(j.a0.to_hermitian()?, a)?;
        if t.g != j.g || t.d != j.d {
            return Err(Error::DimensionMismatch(format!(
                "declared (g, d) = ({}, {}) but data has ({}, {})",
                j.g, j.d, t.g, t.d
            )));
        }
        if j.monic && !t.monic {
            return Err(Error::InvalidArgument("tuple declared monic but A0 ≠ I".into()));
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub g: usize,
    pub d: usize,
    #[serde(rename = "A0")]
    pub a0: MatrixJson,
    #[serde(rename = "A")]
    pub a: Vec<MatrixJson>,
    #[serde(default)]
    pub monic: bool,
}

/// A `g`-tuple of `n×n` Hermitian matrices.
#[derive(Clone, Debug)]
pub struct MatrixTuplePoint {
    pub n: usize,
    pub x: Vec<HermitianMatrix>,
}

impl MatrixTuplePoint {
    pub fn new(x: Vec<HermitianMatrix>) -> Result<Self> {
        let n = x.first().map_or(1, |m| m.dim());
        if x.iter().any(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch("tuple point dimensions differ".into()));
        }
        Ok(Self { n, x })
    }
}

fn check_len(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!("{got} coordinates for a {want}-tuple")));
    }
    Ok(())
}

fn check_enumeration(g: usize) -> Result<()> {
    if g > MAX_SIGN_ENUMERATION {
        return Err(Error::Guard {
            what: "sign-vector length g",
            value: g,
            limit: MAX_SIGN_ENUMERATION,
        });
    }
    Ok(())
}

/// `ε_i = +1` iff bit `i` of `mask` is clear.
pub fn sign(mask: u64, i: usize) -> f64 {
    if mask >> i & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `max_ε f(ε)` over `{±1}^g`, enumerated in parallel.
pub fn max_over_signs<F>(g: usize, f: F) -> Result<f64>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    check_enumeration(g)?;
    let vals: Vec<f64> = (0..1u64 << g)
        .into_par_iter()
        .map(f)
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Diagonal realization of the matrix cube: `d = 2g`, `A_i` has `+1` and `−1`
/// at positions `2i−1` and `2i` (one-based).
pub fn cube_tuple(g: usize) -> SpectrahedronTuple {
    let d = 2 * g;
    let a = (0..g)
        .map(|i| {
            let mut diag = vec![0.0; d];
            diag[2 * i] = 1.0;
            diag[2 * i + 1] = -1.0;
            HermitianMatrix::diag(&diag)
        })
        .collect();
    SpectrahedronTuple {
        g,
        d,
        a0: HermitianMatrix::identity(d),
        a,
        monic: true,
    }
}

pub fn cube_membership(x: &MatrixTuplePoint, tol: f64) -> Result<bool> {
    for m in &x.x {
        if m.op_norm()? > 1.0 + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn diamond_membership(x: &MatrixTuplePoint, tol: f64) -> Result<bool> {
    let n = x.n;
    let worst = max_over_signs(x.x.len(), |mask| {
        let mut s = HermitianMatrix::zeros(n);
        for (i, m) in x.x.iter().enumerate() {
            s = &s + &m.scale(sign(mask, i));
        }
        s.lambda_max()
    })?;
    Ok(worst <= 1.0 + tol)
}

/// Vertex test of `D_□(1) ⊆ D_B(1)`: `λ_max(Σ ε_i B_i − B_0) ≤ tol` for all signs.
pub fn level1_cube_in(b: &SpectrahedronTuple, tol: f64) -> Result<bool> {
    let worst = max_over_signs(b.g, |mask| {
        let mut s = b.a0.scale(-1.0);
        for (i, m) in b.a.iter().enumerate() {
            s = &s + &m.scale(sign(mask, i));
        }
        s.lambda_max()
    })?;
    Ok(worst <= tol)
}

/// `max_ε λ_max(Σ ε_i B_i)`; a monic tuple contains the level-1 cube iff this is ≤ 1.
pub fn level1_value(b: &SpectrahedronTuple) -> Result<f64> {
    max_over_signs(b.g, |mask| {
        let mut s = HermitianMatrix::zeros(b.d);
        for (i, m) in b.a.iter().enumerate() {
            s = &s + &m.scale(sign(mask, i));
        }
        s.lambda_max()
    })
}

/// Monic tuple on `supp(A_0)` describing the same free spectrahedron:
/// `C_i = Λ^{-1/2} P† A_i P Λ^{-1/2}` with `A_0 = P Λ P†` restricted to its support.
pub fn normalize_nonmonic(s: &SpectrahedronTuple) -> Result<SpectrahedronTuple> {
    if s.monic {
        return Ok(s.clone());
    }
    let scale = s.a0.op_norm()?.max(1.0);
    for (i, a) in s.a.iter().enumerate() {
        for (sg, ch) in [(1.0, '+'), (-1.0, '-')] {
            let v = (&a.scale(sg * INTERIOR_DELTA) - &s.a0).lambda_max()?;
            if v > 1e-12 * scale {
                return Err(Error::NotInterior {
                    index: i + 1,
                    sign: ch,
                    violation: v,
                });
            }
        }
    }
    let spec = s.a0.eig()?;
    let top = spec.eigenvalues.first().copied().unwrap_or(0.0).abs();
    let keep: Vec<usize> = (0..s.d)
        .filter(|&k| spec.eigenvalues[k] > SUPPORT_THRESHOLD * top)
        .collect();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("A0 has empty support".into()));
    }
    let r = keep.len();
    let v = &spec.eigenvectors;
    let p = ComplexMatrix::from_fn(s.d, r, |i, k| {
        v[(i, keep[k])] / spec.eigenvalues[keep[k]].sqrt()
    });
    let pa = p.adjoint();
    let a = s
        .a
        .iter()
        .map(|m| m.congruence(&pa))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrahedronTuple {
        g: s.g,
        d: r,
        a0: HermitianMatrix::identity(r),
        a,
        monic: true,
    })
}

/// Outcome of the cube-inclusion SDP
/// `min t  s.t.  C ⪰ 0,  Tr_1 C = t I_d,  Tr_1[C (A_iᵀ ⊗ I)] = B_i`.
#[derive(Clone, Debug)]
pub struct InclusionResult {
    pub g: usize,
    pub d: usize,
    pub t_min: f64,
    /// `s·D_□ ⊆ D_B` iff `s ≤ max_scale = 1/t_min`.
    pub max_scale: f64,
    /// Choi matrix on `C^{2g} ⊗ C^d`.
    pub choi_witness: HermitianMatrix,
    pub dual_state: HermitianMatrix,
    /// `Σ ‖ρ^{1/2} B_i ρ^{1/2}‖₁` at the dual state.
    pub certificate: f64,
    pub relative_gap: f64,
}

impl InclusionResult {
    /// The unital map `Φ(X) = Tr_1[C (Xᵀ ⊗ I_d)] / t_min` from `M_{2g}` to `M_d`.
    pub fn apply_map(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let k = x.transpose().kron(&ComplexMatrix::identity(self.d))?;
        let m = self.choi_witness.matrix().matmul(&k)?;
        Ok(m.partial_trace_first(2 * self.g, self.d)?.scale_real(1.0 / self.t_min))
    }
}

pub fn cube_inclusion(b: &SpectrahedronTuple) -> Result<InclusionResult> {
    cube_inclusion_with(b, &Settings::default())
}

pub fn cube_inclusion_with(b: &SpectrahedronTuple, settings: &Settings) -> Result<InclusionResult> {
    if !b.monic {
        return Err(Error::InvalidArgument(
            "cube inclusion needs a monic tuple; normalize it first".into(),
        ));
    }
    let (g, d) = (b.g, b.d);
    let n = 2 * g * d;
    if n > INCLUSION_BUDGET || g == 0 {
        return Err(Error::Guard {
            what: "2g·d",
            value: n,
            limit: INCLUSION_BUDGET,
        });
    }
    if b.a.iter().all(|m| m.matrix().max_abs() == 0.0) {
        return Ok(InclusionResult {
            g,
            d,
            t_min: 0.0,
            max_scale: f64::INFINITY,
            choi_witness: HermitianMatrix::zeros(n),
            dual_state: HermitianMatrix::identity(d).scale(1.0 / d as f64),
            certificate: 0.0,
            relative_gap: 0.0,
        });
    }

    let basis = hermitian_basis(d);
    let cube = cube_tuple(g);
    let id2g = HermitianMatrix::identity(2 * g);
    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    for h in &basis {
        let mut c = SymBlockMatrix::new();
        c.add_hermitian(0, &id2g.kron(h)?, 1.0);
        c.add(1, 0, 0, -h.trace());
        constraints.push(c);
        rhs.push(0.0);
    }
    for (ai, bi) in cube.a.iter().zip(&b.a) {
        let at = HermitianMatrix::new(ai.matrix().transpose())?;
        for h in &basis {
            let mut c = SymBlockMatrix::new();
            c.add_hermitian(0, &at.kron(h)?, 1.0);
            constraints.push(c);
            rhs.push(h.inner(bi)?);
        }
    }
    let mut objective = SymBlockMatrix::new();
    objective.add(1, 0, 0, 1.0);
    let problem = SdpProblem::new(vec![2 * n, 1], objective, constraints, rhs)?;
    let sol = sdp::solve(&problem, settings);
    if sol.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "inclusion SDP ended with {:?} (primal inf {:.2e}, dual inf {:.2e}, gap {:.2e})",
            sol.status, sol.primal_infeasibility, sol.dual_infeasibility, sol.relative_gap
        )));
    }

    let t_min = sol.primal_objective;
    let choi = decode_hermitian(&sol.x[0]);
    let dd = basis.len();
    let mut y0 = HermitianMatrix::zeros(d);
    for (h, &y) in basis.iter().zip(sol.y.iter().take(dd)) {
        y0 = &y0 + &h.scale(y);
    }
    let rho = project_to_state(&y0.scale(-1.0))?;
    let certificate = dual_certificate(b, &rho)?;
    Ok(InclusionResult {
        g,
        d,
        t_min,
        max_scale: 1.0 / t_min,
        choi_witness: choi,
        dual_state: rho,
        certificate,
        relative_gap: sol.relative_gap,
    })
}

/// Nearest density matrix in the sense of clipping negative eigenvalues and
/// renormalizing the trace.
fn project_to_state(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let p = m.eig()?.map(|l| l.max(0.0));
    let t = p.trace();
    if t <= 0.0 {
        let d = m.dim();
        return Ok(HermitianMatrix::identity(d).scale(1.0 / d as f64));
    }
    Ok(p.scale(1.0 / t))
}

/// `Σ ‖ρ^{1/2} B_i ρ^{1/2}‖₁`, a lower bound on the inclusion SDP value for any state ρ.
pub fn dual_certificate(b: &SpectrahedronTuple, rho: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != b.d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a tuple of dimension {}",
            rho.dim(),
            b.d
        )));
    }
    let lmin = rho.lambda_min()?;
    if lmin < -1e-9 {
        return Err(Error::NotAState(format!("minimum eigenvalue {lmin:e}")));
    }
    if (rho.trace() - 1.0).abs() > 1e-8 {
        return Err(Error::NotAState(format!("trace {}", rho.trace())));
    }
    let r = rho.sqrt_psd()?;
    let mut s = 0.0;
    for m in &b.a {
        s += m.congruence(r.matrix())?.trace_norm()?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn herm(m: ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn cube_tuple_layout() {
        let c = cube_tuple(1);
        assert_eq!(c.a[0], HermitianMatrix::diag(&[1.0, -1.0]));
        let c = cube_tuple(2);
        assert_eq!(c.a[1], HermitianMatrix::diag(&[0.0, 0.0, 1.0, -1.0]));
        assert!(c.monic);
    }

    #[test]
    fn memberships() {
        let [x, y, z] = pauli();
        let p = MatrixTuplePoint::new(vec![herm(x.clone()), herm(y.clone())]).unwrap();
        assert!(cube_membership(&p, MEMBERSHIP_TOL).unwrap());
        assert!(!diamond_membership(&p, MEMBERSHIP_TOL).unwrap());
        let half = MatrixTuplePoint::new(vec![herm(x.scale_real(0.5)), herm(y.scale_real(0.5))]).unwrap();
        assert!(diamond_membership(&half, MEMBERSHIP_TOL).unwrap());
        let big = MatrixTuplePoint::new(vec![herm(z.scale_real(2.0))]).unwrap();
        assert!(!cube_membership(&big, MEMBERSHIP_TOL).unwrap());
    }

    #[test]
    fn level1_examples() {
        let [x, y, _] = pauli();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let b = SpectrahedronTuple::monic(vec![herm(x.scale_real(r)), herm(y.scale_real(r))]).unwrap();
        assert!(level1_cube_in(&b, MEMBERSHIP_TOL).unwrap());
        let b = SpectrahedronTuple::monic(vec![herm(x), herm(y)]).unwrap();
        assert!(!level1_cube_in(&b, MEMBERSHIP_TOL).unwrap());
        let zero = SpectrahedronTuple::new(HermitianMatrix::identity(2), vec![]).unwrap();
        assert!(level1_cube_in(&zero, MEMBERSHIP_TOL).unwrap());
    }

    #[test]
    fn normalize_scalar_congruence() {
        let [x, _, _] = pauli();
        let s = SpectrahedronTuple::new(HermitianMatrix::identity(2).scale(2.0), vec![herm(x.clone())]).unwrap();
        let c = normalize_nonmonic(&s).unwrap();
        assert!(c.monic);
        assert!(c.a[0].max_abs_diff(&herm(x.scale_real(0.5))) < 1e-14);
    }

    #[test]
    fn normalize_rank_deficient() {
        let s = SpectrahedronTuple::new(HermitianMatrix::diag(&[1.0, 0.0]), vec![HermitianMatrix::diag(&[0.5, 0.0])])
            .unwrap();
        let c = normalize_nonmonic(&s).unwrap();
        assert_eq!(c.d, 1);
        assert!(c.a[0].max_abs_diff(&HermitianMatrix::diag(&[0.5])) < 1e-14);
    }

    #[test]
    fn normalize_rejects_non_interior() {
        let s = SpectrahedronTuple::new(HermitianMatrix::diag(&[1.0, 0.0]), vec![HermitianMatrix::diag(&[0.0, 1.0])])
            .unwrap();
        assert!(matches!(
            normalize_nonmonic(&s),
            Err(Error::NotInterior { index: 1, sign: '+', .. })
        ));
    }

    #[test]
    fn dual_certificate_examples() {
        let [x, y, z] = pauli();
        let b = SpectrahedronTuple::monic(vec![herm(x.clone())]).unwrap();
        let mixed = HermitianMatrix::identity(2).scale(0.5);
        assert!((dual_certificate(&b, &mixed).unwrap() - 1.0).abs() < 1e-12);
        let r = 1.0 / 3f64.sqrt();
        let b = SpectrahedronTuple::monic(vec![herm(x.scale_real(r)), herm(y.scale_real(r)), herm(z.scale_real(r))])
            .unwrap();
        assert!((dual_certificate(&b, &mixed).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        let pure = HermitianMatrix::diag(&[1.0, 0.0]);
        assert!((dual_certificate(&b, &pure).unwrap() - r).abs() < 1e-12);
        assert!(dual_certificate(&b, &HermitianMatrix::diag(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn single_pauli_inclusion() {
        let [_, _, z] = pauli();
        let b = SpectrahedronTuple::monic(vec![herm(z)]).unwrap();
        let r = cube_inclusion(&b).unwrap();
        assert!((r.max_scale - 1.0).abs() < 1e-6, "{}", r.max_scale);
    }

    #[test]
    fn pauli_pair_inclusion() {
        let [x, y, _] = pauli();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = SpectrahedronTuple::monic(vec![herm(x.scale_real(s)), herm(y.scale_real(s))]).unwrap();
        let r = cube_inclusion(&b).unwrap();
        assert!((r.t_min - 2f64.sqrt()).abs() < 1e-6, "{}", r.t_min);
        assert!(r.certificate <= r.t_min + 1e-6);
        assert!((r.certificate - r.t_min).abs() < 1e-6);
    }
}
