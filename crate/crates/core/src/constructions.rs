//! Extremal objects: anticommuting families, Pauli-type inequalities and their
//! optimal assemblages, and Haar-net inequalities with certified classical values.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::constants::tau_star;
use crate::error::{Error, Result};
use crate::linalg::{
    haar_unitary, pauli, random_unit_vector, ComplexMatrix, HermitianMatrix, RandomStream,
};
use crate::steering::{Assemblage, SteeringInequality};

pub const MAX_ANTICOMMUTING: usize = 13;
pub const DEFAULT_GRID_LEVEL: usize = 5;

/// Hermitian unitaries with `F_i F_j + F_j F_i = 2 δ_ij I`.
#[derive(Clone, Debug)]
pub struct AnticommutingFamily {
    pub g: usize,
    pub dim: usize,
    pub f: Vec<HermitianMatrix>,
}

fn guard(g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidArgument("need at least one operator".into()));
    }
    if g > MAX_ANTICOMMUTING {
        return Err(Error::Guard {
            what: "anticommuting family size g",
            value: g,
            limit: MAX_ANTICOMMUTING,
        });
    }
    Ok(())
}

/// Level `k` has `2k+1` operators on `C^{2^k}`:
/// `F_i ← σ_X ⊗ F_i`, then append `σ_Y ⊗ I` and `σ_Z ⊗ I`.
pub fn anticommuting_family(g: usize) -> Result<AnticommutingFamily> {
    guard(g)?;
    let [sx, sy, sz] = pauli();
    let mut f = vec![ComplexMatrix::identity(1)];
    let mut dim = 1;
    while f.len() < g {
        let id = ComplexMatrix::identity(dim);
        let mut next: Vec<ComplexMatrix> = f.iter().map(|m| sx.kron(m)).collect::<Result<_>>()?;
        next.push(sy.kron(&id)?);
        next.push(sz.kron(&id)?);
        f = next;
        dim *= 2;
    }
    f.truncate(g);
    Ok(AnticommutingFamily {
        g,
        dim,
        f: f.into_iter().map(HermitianMatrix::new).collect::<Result<_>>()?,
    })
}

/// Unbiased inequality `F_{+|x} = F_x`, `F_{−|x} = −F_x` from the anticommuting family.
pub fn pauli_inequality(g: usize) -> Result<SteeringInequality> {
    SteeringInequality::unbiased(anticommuting_family(g)?.f)
}

/// `σ_{±|x} = (I ± F_x)/(2d)`.
pub fn optimal_assemblage(g: usize) -> Result<Assemblage> {
    let fam = anticommuting_family(g)?;
    let d = fam.dim;
    let id = HermitianMatrix::identity(d);
    let s = 1.0 / (2.0 * d as f64);
    Assemblage::new(
        fam.f.iter().map(|f| (&id + f).scale(s)).collect(),
        fam.f.iter().map(|f| (&id - f).scale(s)).collect(),
    )
}

/// Finite set of unitaries with empirical Haar cell weights.
#[derive(Clone, Debug)]
pub struct UnitaryNet {
    pub d: usize,
    /// Covering radius of the net over the Haar pool it was drawn from.
    pub delta: f64,
    pub points: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

fn distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    (u - v).op_norm().expect("square unitaries")
}

fn nearest(points: &[ComplexMatrix], u: &ComplexMatrix) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, distance(p, u)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty net")
}

/// Greedy farthest-point subsample of a Haar pool; weights are nearest-point
/// frequencies over a fresh sample of `10·pool` Haar unitaries.
pub fn unitary_net(d: usize, target_k: usize, pool: usize, rng: &RandomStream) -> Result<UnitaryNet> {
    if d == 0 || target_k == 0 || target_k > pool {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ K ≤ pool (K = {target_k}, pool = {pool}) and d ≥ 1"
        )));
    }
    let mut r = rng.split(0);
    let candidates: Vec<ComplexMatrix> = (0..pool).map(|_| haar_unitary(d, &mut r)).collect();
    let mut chosen = vec![0usize];
    let mut dist: Vec<f64> = candidates.par_iter().map(|u| distance(u, &candidates[0])).collect();
    while chosen.len() < target_k {
        let (far, _) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty pool");
        chosen.push(far);
        let p = &candidates[far];
        let upd: Vec<f64> = candidates.par_iter().map(|u| distance(u, p)).collect();
        for (d0, d1) in dist.iter_mut().zip(upd) {
            *d0 = d0.min(d1);
        }
    }
    let delta = dist.iter().copied().fold(0.0, f64::max);
    let points: Vec<ComplexMatrix> = chosen.iter().map(|&i| candidates[i].clone()).collect();

    let fresh = 10 * pool;
    let chunks = fresh.div_ceil(1024);
    let counts: Vec<Vec<usize>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.split(1 + c as u64);
            let mut k = vec![0usize; points.len()];
            for _ in 0..1024.min(fresh - c * 1024) {
                let u = haar_unitary(d, &mut r);
                k[nearest(&points, &u).0] += 1;
            }
            k
        })
        .collect();
    let mut total = vec![0usize; points.len()];
    for k in counts {
        for (t, x) in total.iter_mut().zip(k) {
            *t += x;
        }
    }
    let weights = total.iter().map(|&c| c as f64 / fresh as f64).collect();
    Ok(UnitaryNet {
        d,
        delta,
        points,
        weights,
    })
}

/// Largest distance from `samples` fresh Haar unitaries to the net.
pub fn covering_radius_estimate(net: &UnitaryNet, samples: usize, rng: &RandomStream) -> f64 {
    let chunks = samples.div_ceil(1024);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.split(c as u64);
            (0..1024.min(samples - c * 1024))
                .map(|_| nearest(&net.points, &haar_unitary(net.d, &mut r)).1)
                .fold(0.0, f64::max)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// `diag(+1 × ⌈d/2⌉, −1 × ⌊d/2⌋)/τ*(d)`, normalized so `E_φ|⟨φ, Bφ⟩| = 1`.
pub fn balanced_b(d: usize) -> Result<HermitianMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument("balanced B needs d ≥ 2".into()));
    }
    let t = tau_star(d)?;
    let diag: Vec<f64> = (0..d)
        .map(|k| if k < d.div_ceil(2) { 1.0 / t } else { -1.0 / t })
        .collect();
    Ok(HermitianMatrix::diag(&diag))
}

#[derive(Clone, Debug)]
pub struct NetInequality {
    pub b: HermitianMatrix,
    pub net: UnitaryNet,
    /// `A_i = (1 + 2δ‖B‖₁)^{-1} u_i U_i† B U_i`.
    pub a: Vec<HermitianMatrix>,
    /// `X_i = (U_i† Pol(B)† U_i)ᵀ`.
    pub witness_x: Vec<HermitianMatrix>,
    pub vl_upper: f64,
    /// Whether `vl_upper` is a certified bound rather than a sampled estimate.
    pub vl_certified: bool,
    /// `⟨Ω, Σ A_i ⊗ X_i Ω⟩` for the maximally entangled `Ω`.
    pub vq_lower: f64,
}

impl NetInequality {
    pub fn ratio(&self) -> f64 {
        self.vq_lower / self.vl_upper
    }

    /// The unbiased inequality with `F_{+|i} = A_i`.
    pub fn as_inequality(&self) -> Result<SteeringInequality> {
        SteeringInequality::unbiased(self.a.clone())
    }
}

pub fn net_inequality(net: &UnitaryNet, grid: usize, rng: &RandomStream) -> Result<NetInequality> {
    let d = net.d;
    let b = balanced_b(d)?;
    let b1 = b.trace_norm()?;
    let s = 1.0 / (1.0 + 2.0 * net.delta * b1);
    let pol = b.polar_sign()?;
    let mut a = Vec::with_capacity(net.points.len());
    let mut xs = Vec::with_capacity(net.points.len());
    for (u, &w) in net.points.iter().zip(&net.weights) {
        a.push(b.conjugate_by(u)?.scale(s * w));
        let x = u.adjoint().matmul(&pol.adjoint())?.matmul(u)?.transpose();
        xs.push(HermitianMatrix::new(x)?);
    }
    // ⟨Ω, (A ⊗ X) Ω⟩ = Tr(A Xᵀ)/d
    let mut vq = 0.0;
    for (ai, xi) in a.iter().zip(&xs) {
        vq += ai.inner(&HermitianMatrix::new(xi.matrix().transpose())?)?;
    }
    vq /= d as f64;
    let mut ineq = NetInequality {
        b,
        net: net.clone(),
        a,
        witness_x: xs,
        vl_upper: f64::NAN,
        vl_certified: false,
        vq_lower: vq,
    };
    let bound = vl_net_certified(&ineq, grid, rng)?;
    ineq.vl_upper = bound.value;
    ineq.vl_certified = bound.certified;
    Ok(ineq)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VlBound {
    pub value: f64,
    pub certified: bool,
}

/// Upper bound on `V_L = sup_{‖v‖=1} Σ_i |⟨v, A_i v⟩|`.
///
/// For `d = 2`, `⟨v, A_i v⟩ = c_i + r_i·n` on the Bloch sphere and the convex
/// objective is bounded on each icosphere triangle by the smaller of a
/// Lipschitz bound and the maximum over the vertices of the enclosing frustum.
/// Other dimensions fall back to an uncertified sampled estimate.
pub fn vl_net_certified(ineq: &NetInequality, grid: usize, rng: &RandomStream) -> Result<VlBound> {
    if ineq.net.d != 2 {
        let d = ineq.net.d;
        let mut r = rng.split(0);
        let mut best = 0.0f64;
        for _ in 0..10_000 {
            let v = random_unit_vector(d, &mut r);
            best = best.max(sampled_value(&ineq.a, &v)?);
        }
        return Ok(VlBound {
            value: best,
            certified: false,
        });
    }
    let [sx, sy, sz] = pauli();
    let coeffs: Vec<(f64, [f64; 3])> = ineq
        .a
        .iter()
        .map(|h| {
            let m = h.matrix();
            let tr = |p: &ComplexMatrix| m.matmul(p).map(|q| q.trace().re / 2.0);
            Ok((h.trace() / 2.0, [tr(&sx)?, tr(&sy)?, tr(&sz)?]))
        })
        .collect::<Result<_>>()?;
    Ok(VlBound {
        value: bloch_sphere_bound(&coeffs, grid),
        certified: true,
    })
}

fn sampled_value(a: &[HermitianMatrix], v: &[crate::linalg::C64]) -> Result<f64> {
    let mut s = 0.0;
    for h in a {
        let hv = h.matrix().mul_vec(v)?;
        s += crate::linalg::inner(v, &hv).re.abs();
    }
    Ok(s)
}

/// `max_{|n|=1} Σ_i |c_i + r_i·n|`, bounded from above on an icosphere grid.
pub fn bloch_sphere_bound(coeffs: &[(f64, [f64; 3])], level: usize) -> f64 {
    let f = |p: [f64; 3]| -> f64 {
        coeffs
            .iter()
            .map(|(c, r)| (c + r[0] * p[0] + r[1] * p[1] + r[2] * p[2]).abs())
            .sum()
    };
    let lip: f64 = coeffs.iter().map(|(_, r)| norm3(*r)).sum();
    let (verts, tris) = icosphere(level);
    let fv: Vec<f64> = verts.par_iter().map(|&p| f(p)).collect();
    tris.par_iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| verts[i]);
            let vmax = fv[t[0]].max(fv[t[1]]).max(fv[t[2]]);
            let rho = plane_distance(a, b, c);
            let e = dist3(a, b).max(dist3(b, c)).max(dist3(a, c));
            let lipschitz = vmax + lip * (e + 1.0 - rho);
            // Spherical triangle ⊆ conv{a, b, c, a/ρ, b/ρ, c/ρ}; f is convex.
            let far = [a, b, c]
                .iter()
                .map(|p| f(p.map(|x| x / rho)))
                .fold(vmax, f64::max);
            lipschitz.min(far)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

fn norm3(p: [f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Distance from the origin to the plane through `a, b, c` (all on the unit sphere).
fn plane_distance(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let n = cross(
        [b[0] - a[0], b[1] - a[1], b[2] - a[2]],
        [c[0] - a[0], c[1] - a[1], c[2] - a[2]],
    );
    let nn = norm3(n);
    ((n[0] * a[0] + n[1] * a[1] + n[2] * a[2]) / nn).abs()
}

/// Subdivided icosahedron with vertices projected to the unit sphere.
pub fn icosphere(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&p| p.map(|x| x / norm3(p)))
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (i.min(j), i.max(j));
            *mid.entry(key).or_insert_with(|| {
                let (a, b) = (verts[i], verts[j]);
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                let n = norm3(m);
                verts.push(m.map(|x| x / n));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (verts, tris)
}
