//! Dichotomic steering inequalities, assemblages and POVM collections.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::json::MatrixJson;
use crate::linalg::{
    hermitian_basis, outer, sum, ComplexMatrix, HermitianMatrix, RandomStream,
};
use crate::sdp::{self, decode_hermitian, Feasibility, SdpProblem, Settings, SymBlockMatrix};
use crate::spectrahedra::{self, max_over_signs, sign, SpectrahedronTuple};

/// Largest number of measurements for the joint-measurability SDP (`2^g` blocks).
pub const MAX_JM_SETTINGS: usize = 8;
/// Boundary band of the joint-measurability decision.
pub const JM_MARGIN: f64 = 1e-7;

const UNBIASED_TOL: f64 = 1e-10;
const PSD_SLACK: f64 = 1e-9;
const SEESAW_GAIN: f64 = 1e-9;
const SEESAW_MAX_ITER: usize = 10_000;

/// `g` pairs `(F_{+|x}, F_{−|x})` of `d×d` Hermitian matrices; the functional
/// `Σ_x Tr(σ_{+|x} F_{+|x} + σ_{−|x} F_{−|x})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringInequality {
    pub g: usize,
    pub d: usize,
    pub fplus: Vec<HermitianMatrix>,
    pub fminus: Vec<HermitianMatrix>,
}

fn common_dim<'a>(ms: impl IntoIterator<Item = &'a HermitianMatrix>, d: usize) -> Result<()> {
    for m in ms {
        if m.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix of dimension {} where {d} was expected",
                m.dim()
            )));
        }
    }
    Ok(())
}

impl SteeringInequality {
    pub fn new(fplus: Vec<HermitianMatrix>, fminus: Vec<HermitianMatrix>) -> Result<Self> {
        if fplus.len() != fminus.len() || fplus.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} F₊ and {} F₋ matrices",
                fplus.len(),
                fminus.len()
            )));
        }
        let d = fplus[0].dim();
        common_dim(fplus.iter().chain(&fminus), d)?;
        Ok(Self {
            g: fplus.len(),
            d,
            fplus,
            fminus,
        })
    }

    /// `F_{−|x} = −F_{+|x}`.
    pub fn unbiased(fplus: Vec<HermitianMatrix>) -> Result<Self> {
        let fminus = fplus.iter().map(|f| f.scale(-1.0)).collect();
        Self::new(fplus, fminus)
    }

    pub fn zero(g: usize, d: usize) -> Self {
        Self {
            g,
            d,
            fplus: vec![HermitianMatrix::zeros(d); g],
            fminus: vec![HermitianMatrix::zeros(d); g],
        }
    }

    pub fn is_unbiased(&self) -> bool {
        self.fplus
            .iter()
            .zip(&self.fminus)
            .all(|(p, m)| (p + m).matrix().max_abs() <= UNBIASED_TOL)
    }

    pub fn is_zero(&self) -> bool {
        self.fplus.iter().chain(&self.fminus).all(|m| m.matrix().max_abs() == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            g: self.g,
            d: self.d,
            fplus: self.fplus.iter().map(|m| m.scale(c)).collect(),
            fminus: self.fminus.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn to_json(&self) -> InequalityJson {
        InequalityJson {
            g: self.g,
            d: self.d,
            fplus: self.fplus.iter().map(MatrixJson::from_hermitian).collect(),
            fminus: self.fminus.iter().map(MatrixJson::from_hermitian).collect(),
        }
    }

    pub fn from_json(j: &InequalityJson) -> Result<Self> {
        let p: Vec<_> = j.fplus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?;
        let m: Vec<_> = j.fminus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?;
        if p.is_empty() && m.is_empty() {
            if j.g == 0 {
                return Err(Error::InvalidArgument("inequality needs g ≥ 1".into()));
            }
            return Ok(Self::zero(j.g, j.d));
        }
        let f = Self::new(p, m)?;
        if f.g != j.g || f.d != j.d {
            return Err(Error::DimensionMismatch(format!(
                "declared (g, d) = ({}, {}) but data has ({}, {})",
                j.g, j.d, f.g, f.d
            )));
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InequalityJson {
    pub g: usize,
    pub d: usize,
    #[serde(rename = "Fplus")]
    pub fplus: Vec<MatrixJson>,
    #[serde(rename = "Fminus")]
    pub fminus: Vec<MatrixJson>,
}

/// `A_{±|x} = (F_{+|x} ± F_{−|x})/2`.
#[derive(Clone, Debug)]
pub struct ABDecomposition {
    pub aplus: Vec<HermitianMatrix>,
    pub aminus: Vec<HermitianMatrix>,
}

pub fn decompose(f: &SteeringInequality) -> ABDecomposition {
    let (aplus, aminus) = f
        .fplus
        .iter()
        .zip(&f.fminus)
        .map(|(p, m)| ((p + m).scale(0.5), (p - m).scale(0.5)))
        .unzip();
    ABDecomposition { aplus, aminus }
}

/// `V_L = max_ε λ_max(Σ ε_x A_{−|x} + Σ A_{+|x})`.
pub fn vl_value(f: &SteeringInequality) -> Result<f64> {
    let ab = decompose(f);
    let base = sum(f.d, &ab.aplus);
    max_over_signs(f.g, |mask| {
        let mut s = base.clone();
        for (x, a) in ab.aminus.iter().enumerate() {
            s = &s + &a.scale(sign(mask, x));
        }
        s.lambda_max()
    })
}

fn best_signs(f: &SteeringInequality, ab: &ABDecomposition) -> Result<Vec<f64>> {
    let base = sum(f.d, &ab.aplus);
    let mut best = (f64::NEG_INFINITY, 0u64);
    for mask in 0..1u64 << f.g {
        let mut s = base.clone();
        for (x, a) in ab.aminus.iter().enumerate() {
            s = &s + &a.scale(sign(mask, x));
        }
        let v = s.lambda_max()?;
        if v > best.0 {
            best = (v, mask);
        }
    }
    Ok((0..f.g).map(|x| sign(best.1, x)).collect())
}

pub fn vq_value(f: &SteeringInequality) -> Result<f64> {
    vq_value_with(f, &Settings::default())
}

/// Quantum value `sup_{n, ‖X_x‖∞ ≤ 1} λ_max(Σ A_{−|x} ⊗ X_x + Σ A_{+|x} ⊗ I)`.
pub fn vq_value_with(f: &SteeringInequality, settings: &Settings) -> Result<f64> {
    let ab = decompose(f);
    let vl = vl_value(f)?;
    if ab.aminus.iter().all(|a| a.matrix().max_abs() == 0.0) {
        return Ok(vl);
    }
    if f.is_unbiased() {
        // The unbiased value is homogeneous: rescale so the level-1 vertex test is tight.
        if vl <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "unbiased inequality with nonpositive classical value {vl}"
            )));
        }
        let b = SpectrahedronTuple::monic(ab.aminus.iter().map(|a| a.scale(1.0 / vl)).collect())?;
        let r = spectrahedra::cube_inclusion_with(&b, settings)?;
        return Ok(vl * r.t_min);
    }
    vq_biased(f, &ab, vl, settings)
}

fn vq_biased(f: &SteeringInequality, ab: &ABDecomposition, vl: f64, settings: &Settings) -> Result<f64> {
    let splus = sum(f.d, &ab.aplus);
    let spread: f64 = ab
        .aminus
        .iter()
        .map(|a| a.op_norm())
        .sum::<Result<f64>>()?;
    let scale = spread + splus.op_norm()?;
    // V_Q ≤ t  iff  D_□ ⊆ D̂ of (tI − ΣA₊; A₋).
    let included = |t: f64| -> Result<bool> {
        let a0 = &HermitianMatrix::identity(f.d).scale(t) - &splus;
        let tuple = SpectrahedronTuple::new(a0, ab.aminus.clone())?;
        let monic = spectrahedra::normalize_nonmonic(&tuple)?;
        Ok(spectrahedra::cube_inclusion_with(&monic, settings)?.t_min <= 1.0 + 1e-9)
    };
    let mut lo = vl;
    let mut hi = spread + splus.lambda_max()?;
    if hi <= lo {
        return Ok(lo);
    }
    // Step just above the upper bound, which can be tight, so SDP roundoff
    // cannot reject it.
    hi += 1e-6 * scale;
    if !included(hi)? {
        return Err(Error::Bisection(format!(
            "inclusion fails at the a-priori upper bound {hi}"
        )));
    }
    while hi - lo > 1e-6 * hi.abs().max(lo.abs()).max(1e-3 * scale) {
        let mid = 0.5 * (lo + hi);
        if included(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `V_Q/V_L` with `0/0 = 1`.
pub fn violation(f: &SteeringInequality) -> Result<f64> {
    violation_with(f, &Settings::default())
}

pub fn violation_with(f: &SteeringInequality, settings: &Settings) -> Result<f64> {
    let vl = vl_value(f)?;
    let vq = vq_value_with(f, settings)?;
    ratio(vq, vl)
}

pub fn ratio(vq: f64, vl: f64) -> Result<f64> {
    if vl.abs() <= 1e-12 && vq.abs() <= 1e-12 {
        return Ok(1.0);
    }
    if vl <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "violation undefined for classical value {vl} and quantum value {vq}"
        )));
    }
    Ok(vq / vl)
}

/// See-saw lower bound on the level-`n` quantum value.
pub fn vq_seesaw(f: &SteeringInequality, n: usize, restarts: usize, rng: &RandomStream) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("level n must be at least 1".into()));
    }
    if n == 1 {
        return vl_value(f);
    }
    let ab = decompose(f);
    let signs = best_signs(f, &ab)?;
    let seeded: Vec<HermitianMatrix> = signs
        .iter()
        .map(|&s| HermitianMatrix::identity(n).scale(s))
        .collect();
    let runs: Vec<f64> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                seeded.clone()
            } else {
                let mut rr = rng.split(r as u64);
                (0..f.g)
                    .map(|_| {
                        let h = crate::linalg::random_hermitian(n, &mut rr);
                        HermitianMatrix::new(h.polar_sign()?)
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            seesaw_run(f, &ab, n, start)
        })
        .collect::<Result<_>>()?;
    Ok(runs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn seesaw_run(f: &SteeringInequality, ab: &ABDecomposition, n: usize, mut xs: Vec<HermitianMatrix>) -> Result<f64> {
    let d = f.d;
    let plus = HermitianMatrix::identity(n).kron(&sum(d, &ab.aplus))?;
    let lifted: Vec<HermitianMatrix> = ab
        .aminus
        .iter()
        .map(|a| HermitianMatrix::identity(n).kron(a))
        .collect::<Result<_>>()?;
    let mut value = f64::NEG_INFINITY;
    for _ in 0..SEESAW_MAX_ITER {
        let mut op = plus.clone();
        for (x, a) in xs.iter().zip(&ab.aminus) {
            op = &op + &x.kron(a)?;
        }
        let spec = op.eig()?;
        let top = spec.eigenvalues[0];
        let gain = top - value;
        value = value.max(top);
        if gain < SEESAW_GAIN {
            break;
        }
        let v = spec.eigenvectors.column(0);
        let rho = outer(&v, &v);
        xs = lifted
            .iter()
            .map(|l| {
                let nx = HermitianMatrix::new(l.matrix().matmul(&rho)?.partial_trace_second(n, d)?)?;
                HermitianMatrix::new(nx.polar_sign()?)
            })
            .collect::<Result<_>>()?;
    }
    Ok(value)
}

/// Conditional states `σ_{a|x}` with common average `σ̄ = σ_{+|x} + σ_{−|x}`, `Tr σ̄ = 1`.
#[derive(Clone, Debug)]
pub struct Assemblage {
    pub g: usize,
    pub d: usize,
    pub sigma_plus: Vec<HermitianMatrix>,
    pub sigma_minus: Vec<HermitianMatrix>,
}

impl Assemblage {
    pub fn new(sigma_plus: Vec<HermitianMatrix>, sigma_minus: Vec<HermitianMatrix>) -> Result<Self> {
        if sigma_plus.len() != sigma_minus.len() || sigma_plus.is_empty() {
            return Err(Error::DimensionMismatch("assemblage needs matching nonempty lists".into()));
        }
        let d = sigma_plus[0].dim();
        common_dim(sigma_plus.iter().chain(&sigma_minus), d)?;
        for s in sigma_plus.iter().chain(&sigma_minus) {
            let l = s.lambda_min()?;
            if l < -PSD_SLACK {
                return Err(Error::InvalidArgument(format!(
                    "assemblage element has eigenvalue {l:e}"
                )));
            }
        }
        let first = &sigma_plus[0] + &sigma_minus[0];
        for (p, m) in sigma_plus.iter().zip(&sigma_minus) {
            let dev = (p + m).max_abs_diff(&first);
            if dev > 1e-8 {
                return Err(Error::InvalidArgument(format!(
                    "marginal states differ by {dev:e} across measurements"
                )));
            }
        }
        if (first.trace() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "average state has trace {}",
                first.trace()
            )));
        }
        Ok(Self {
            g: sigma_plus.len(),
            d,
            sigma_plus,
            sigma_minus,
        })
    }

    /// `σ̄`, averaged over the measurements.
    pub fn average_state(&self) -> HermitianMatrix {
        let s = sum(self.d, self.sigma_plus.iter().chain(&self.sigma_minus));
        s.scale(1.0 / self.g as f64)
    }

    pub fn to_json(&self) -> AssemblageJson {
        AssemblageJson {
            g: self.g,
            d: self.d,
            sigma_plus: self.sigma_plus.iter().map(MatrixJson::from_hermitian).collect(),
            sigma_minus: self.sigma_minus.iter().map(MatrixJson::from_hermitian).collect(),
        }
    }

    pub fn from_json(j: &AssemblageJson) -> Result<Self> {
        let a = Self::new(
            j.sigma_plus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?,
            j.sigma_minus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?,
        )?;
        if a.g != j.g || a.d != j.d {
            return Err(Error::DimensionMismatch("declared (g, d) disagree with data".into()));
        }
        Ok(a)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssemblageJson {
    pub g: usize,
    pub d: usize,
    pub sigma_plus: Vec<MatrixJson>,
    pub sigma_minus: Vec<MatrixJson>,
}

pub fn assemblage_value(f: &SteeringInequality, a: &Assemblage) -> Result<f64> {
    if f.g != a.g || f.d != a.d {
        return Err(Error::DimensionMismatch(format!(
            "inequality (g, d) = ({}, {}) vs assemblage ({}, {})",
            f.g, f.d, a.g, a.d
        )));
    }
    let mut v = 0.0;
    for x in 0..f.g {
        v += a.sigma_plus[x].inner(&f.fplus[x])? + a.sigma_minus[x].inner(&f.fminus[x])?;
    }
    Ok(v)
}

/// `g` dichotomic POVMs `E_{+|x} + E_{−|x} = I_n`.
#[derive(Clone, Debug)]
pub struct PovmCollection {
    pub g: usize,
    pub n: usize,
    pub eplus: Vec<HermitianMatrix>,
    pub eminus: Vec<HermitianMatrix>,
}

impl PovmCollection {
    pub fn new(eplus: Vec<HermitianMatrix>, eminus: Vec<HermitianMatrix>) -> Result<Self> {
        if eplus.len() != eminus.len() || eplus.is_empty() {
            return Err(Error::DimensionMismatch("POVM collection needs matching nonempty lists".into()));
        }
        let n = eplus[0].dim();
        common_dim(eplus.iter().chain(&eminus), n)?;
        let id = HermitianMatrix::identity(n);
        for (p, m) in eplus.iter().zip(&eminus) {
            for e in [p, m] {
                let l = e.lambda_min()?;
                if l < -PSD_SLACK {
                    return Err(Error::InvalidArgument(format!("effect has eigenvalue {l:e}")));
                }
            }
            let dev = (p + m).max_abs_diff(&id);
            if dev > 1e-9 {
                return Err(Error::InvalidArgument(format!("effects sum to I only within {dev:e}")));
            }
        }
        Ok(Self {
            g: eplus.len(),
            n,
            eplus,
            eminus,
        })
    }

    /// Collection from `E_{+|x}`, completing with `E_{−|x} = I − E_{+|x}`.
    pub fn from_plus(eplus: Vec<HermitianMatrix>) -> Result<Self> {
        let n = eplus.first().map_or(1, |e| e.dim());
        let id = HermitianMatrix::identity(n);
        let eminus = eplus.iter().map(|e| &id - e).collect();
        Self::new(eplus, eminus)
    }

    /// `E'_{a|x} = s_x E_{a|x} + (1 − s_x) I/2`.
    pub fn with_noise(&self, s: &[f64]) -> Result<Self> {
        if s.len() != self.g {
            return Err(Error::DimensionMismatch("one noise parameter per measurement".into()));
        }
        let half = HermitianMatrix::identity(self.n).scale(0.5);
        let mix = |e: &HermitianMatrix, sx: f64| &e.scale(sx) + &half.scale(1.0 - sx);
        Self::new(
            self.eplus.iter().zip(s).map(|(e, &sx)| mix(e, sx)).collect(),
            self.eminus.iter().zip(s).map(|(e, &sx)| mix(e, sx)).collect(),
        )
    }

    pub fn to_json(&self) -> PovmJson {
        PovmJson {
            g: self.g,
            n: self.n,
            eplus: self.eplus.iter().map(MatrixJson::from_hermitian).collect(),
            eminus: self.eminus.iter().map(MatrixJson::from_hermitian).collect(),
        }
    }

    pub fn from_json(j: &PovmJson) -> Result<Self> {
        let p = Self::new(
            j.eplus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?,
            j.eminus.iter().map(|m| m.to_hermitian()).collect::<Result<_>>()?,
        )?;
        if p.g != j.g || p.n != j.n {
            return Err(Error::DimensionMismatch("declared (g, n) disagree with data".into()));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmJson {
    pub g: usize,
    pub n: usize,
    #[serde(rename = "Eplus")]
    pub eplus: Vec<MatrixJson>,
    #[serde(rename = "Eminus")]
    pub eminus: Vec<MatrixJson>,
}

/// POVMs of an assemblage on the support of its average state.
#[derive(Clone, Debug)]
pub struct PovmImage {
    pub povms: PovmCollection,
    /// `σ̄` restricted to its support, in the basis of `isometry`.
    pub sigma_bar: HermitianMatrix,
    /// `d × r` isometry onto `supp σ̄` (the identity when `σ̄` is invertible).
    pub isometry: ComplexMatrix,
}

impl PovmImage {
    /// Maps an assemblage on the support back to the original space.
    pub fn lift(&self, a: &Assemblage) -> Result<Assemblage> {
        let v = &self.isometry;
        let up = |m: &HermitianMatrix| m.congruence(v);
        Assemblage::new(
            a.sigma_plus.iter().map(up).collect::<Result<_>>()?,
            a.sigma_minus.iter().map(up).collect::<Result<_>>()?,
        )
    }
}

/// `E_{a|x} = σ̄^{-1/2} σ_{a|x} σ̄^{-1/2}` after restricting to `supp σ̄`.
pub fn assemblage_to_povms(a: &Assemblage) -> Result<PovmImage> {
    let sbar = a.average_state();
    let spec = sbar.eig()?;
    let top = spec.eigenvalues[0];
    if top <= 0.0 {
        return Err(Error::InvalidArgument("average state is zero".into()));
    }
    let keep: Vec<usize> = (0..a.d).filter(|&k| spec.eigenvalues[k] > 1e-9 * top).collect();
    let (isometry, restricted) = if keep.len() == a.d {
        (ComplexMatrix::identity(a.d), sbar.clone())
    } else {
        let v = &spec.eigenvectors;
        let iso = ComplexMatrix::from_fn(a.d, keep.len(), |i, k| v[(i, keep[k])]);
        let r = sbar.congruence(&iso.adjoint())?;
        (iso, r)
    };
    let inv_sqrt = restricted.eig()?.map(|l| 1.0 / l.sqrt());
    let w = inv_sqrt.matrix().matmul(&isometry.adjoint())?;
    let map = |m: &HermitianMatrix| m.congruence(&w);
    let eplus: Vec<_> = a.sigma_plus.iter().map(map).collect::<Result<_>>()?;
    let eminus: Vec<_> = a.sigma_minus.iter().map(map).collect::<Result<_>>()?;
    Ok(PovmImage {
        povms: PovmCollection::new(eplus, eminus)?,
        sigma_bar: restricted,
        isometry,
    })
}

/// `σ_{a|x} = σ̄^{1/2} E_{a|x} σ̄^{1/2}`.
pub fn povms_to_assemblage(p: &PovmCollection, sigma_bar: &HermitianMatrix) -> Result<Assemblage> {
    if sigma_bar.dim() != p.n {
        return Err(Error::DimensionMismatch("σ̄ and POVM dimensions differ".into()));
    }
    if sigma_bar.matrix().max_abs() == 0.0 {
        return Err(Error::InvalidArgument("average state is zero".into()));
    }
    let r = sigma_bar.sqrt_psd()?;
    let map = |e: &HermitianMatrix| e.congruence(r.matrix());
    Assemblage::new(
        p.eplus.iter().map(map).collect::<Result<_>>()?,
        p.eminus.iter().map(map).collect::<Result<_>>()?,
    )
}

#[derive(Clone, Debug)]
pub enum JmDecision {
    /// Parent POVM `G_ε`, indexed by sign masks (bit `x` clear ⇔ outcome `+` for `x`).
    Yes { joint: Vec<HermitianMatrix> },
    No { margin: f64 },
    Undecided { margin: f64 },
}

impl JmDecision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Self::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Self::No { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Yes { .. } => "yes",
            Self::No { .. } => "no",
            Self::Undecided { .. } => "undecided",
        }
    }
}

pub fn jointly_measurable(p: &PovmCollection) -> Result<JmDecision> {
    jointly_measurable_with(p, &Settings::default())
}

/// Parent POVM `{G_ε}` with `Σ G_ε = I` and `Σ_{ε_x = +} G_ε = E_{+|x}`.
pub fn jointly_measurable_with(p: &PovmCollection, settings: &Settings) -> Result<JmDecision> {
    if p.g > MAX_JM_SETTINGS {
        return Err(Error::Guard {
            what: "measurements g for joint measurability",
            value: p.g,
            limit: MAX_JM_SETTINGS,
        });
    }
    let n = p.n;
    let blocks = 1usize << p.g;
    let basis = hermitian_basis(n);
    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    for h in &basis {
        let mut c = SymBlockMatrix::new();
        for e in 0..blocks {
            c.add_hermitian(e, h, 1.0);
        }
        constraints.push(c);
        rhs.push(h.trace());
    }
    for x in 0..p.g {
        for h in &basis {
            let mut c = SymBlockMatrix::new();
            for e in (0..blocks).filter(|&e| e >> x & 1 == 0) {
                c.add_hermitian(e, h, 1.0);
            }
            constraints.push(c);
            rhs.push(h.inner(&p.eplus[x])?);
        }
    }
    let problem = SdpProblem::new(vec![2 * n; blocks], SymBlockMatrix::new(), constraints, rhs)?;
    Ok(match sdp::feasibility(&problem, settings, JM_MARGIN)? {
        Feasibility::Feasible { witness, .. } => JmDecision::Yes {
            joint: witness.iter().map(decode_hermitian).collect(),
        },
        Feasibility::Infeasible { margin, .. } => JmDecision::No { margin },
        Feasibility::Undecided { margin } => JmDecision::Undecided { margin },
    })
}

/// LHS model exists iff the POVMs on `supp σ̄` are jointly measurable.
pub fn has_lhs(a: &Assemblage) -> Result<JmDecision> {
    jointly_measurable(&assemblage_to_povms(a)?.povms)
}

#[derive(Clone, Debug)]
pub struct NoiseDirection {
    s: Vec<f64>,
}

impl NoiseDirection {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidArgument("noise direction must lie in [0, 1]^g".into()));
        }
        if s.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidArgument("noise direction must be nonzero".into()));
        }
        Ok(Self { s })
    }

    pub fn components(&self) -> &[f64] {
        &self.s
    }
}

pub fn noise_threshold(p: &PovmCollection, dir: &NoiseDirection) -> Result<f64> {
    noise_threshold_with(p, dir, &Settings::default())
}

/// Largest `λ ∈ [0, 1]` for which the noisy collection at `s = λ·dir` is
/// jointly measurable, to bracket width `1e-4`. Undecided probes count as compatible.
pub fn noise_threshold_with(p: &PovmCollection, dir: &NoiseDirection, settings: &Settings) -> Result<f64> {
    if dir.s.len() != p.g {
        return Err(Error::DimensionMismatch("one direction component per measurement".into()));
    }
    let compatible = |lam: f64| -> Result<bool> {
        let s: Vec<f64> = dir.s.iter().map(|x| lam * x).collect();
        Ok(!jointly_measurable_with(&p.with_noise(&s)?, settings)?.is_no())
    };
    if compatible(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if compatible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
