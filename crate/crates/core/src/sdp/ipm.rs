//! Infeasible-start primal–dual interior-point method (HKM direction with
//! Mehrotra predictor–corrector).

use nalgebra::{DMatrix, DVector};

use super::problem::SdpProblem;

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    /// Target for relative primal/dual infeasibility; the relative gap target is `10·tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            step_fraction: 0.98,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    /// A Farkas ray `ŷ` with `bᵀŷ = 1`, `Aᵀŷ ⪯ 0` was found; see [`SdpSolution::certificate`].
    InfeasibleCertificate,
    /// Stopped at the iteration cap (or stalled) without meeting the tolerances;
    /// the best iterate is returned.
    IterationCap,
}

/// One row of the iterate trace. For every iterate
/// `primal_objective − dual_objective = complementarity + dual_residual_dot − primal_residual_dot`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct IterateRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `⟨X, Z⟩`, nonnegative for interior iterates.
    pub complementarity: f64,
    /// `⟨C − Aᵀy − Z, X⟩`.
    pub dual_residual_dot: f64,
    /// `yᵀ(b − A(X))`.
    pub primal_residual_dot: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: Status,
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `‖b − A(X)‖ / (1 + ‖b‖)`.
    pub primal_infeasibility: f64,
    /// `‖C − Aᵀy − Z‖_F / (1 + ‖C‖_F)`.
    pub dual_infeasibility: f64,
    /// `|pobj − dobj| / (1 + |pobj| + |dobj|)`.
    pub relative_gap: f64,
    pub iterations: usize,
    pub trace: Vec<IterateRecord>,
    pub certificate: Option<DVector<f64>>,
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α` with `X + α dX ⪰ 0` (infinite if `dX ⪰ 0`), given `X = LLᵀ`.
fn max_step(l: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(w) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(v) = l.solve_lower_triangular(&w.transpose()) else {
        return 0.0;
    };
    let min = sym(&v)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

fn step_length(ls: &[DMatrix<f64>], d: &[DMatrix<f64>], fraction: f64) -> f64 {
    let a = ls
        .iter()
        .zip(d)
        .map(|(l, dx)| max_step(l, dx))
        .fold(f64::INFINITY, f64::min);
    (fraction * a).min(1.0)
}

struct Schur {
    factor: SchurFactor,
}

enum SchurFactor {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Schur {
    fn new(mut m: DMatrix<f64>) -> Option<Self> {
        let scale = m.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
        if let Some(c) = m.clone().cholesky() {
            return Some(Self {
                factor: SchurFactor::Cholesky(c),
            });
        }
        for k in [1e-14, 1e-12, 1e-10] {
            let mut r = m.clone();
            for i in 0..r.nrows() {
                r[(i, i)] += k * scale;
            }
            if let Some(c) = r.cholesky() {
                return Some(Self {
                    factor: SchurFactor::Cholesky(c),
                });
            }
        }
        m = sym(&m);
        let lu = m.lu();
        if lu.is_invertible() {
            Some(Self {
                factor: SchurFactor::Lu(lu),
            })
        } else {
            None
        }
    }

    fn solve(&self, h: &DVector<f64>) -> Option<DVector<f64>> {
        match &self.factor {
            SchurFactor::Cholesky(c) => Some(c.solve(h)),
            SchurFactor::Lu(lu) => lu.solve(h),
        }
    }
}

// Expanded (both orientations) constraint entries grouped by block:
// per_block[b] = list of (constraint index, entries (p, q, v)).
type BlockEntries = Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>;

fn expand(p: &SdpProblem) -> BlockEntries {
    let mut per_block: BlockEntries = vec![Vec::new(); p.block_dims().len()];
    for (k, a) in p.constraints().iter().enumerate() {
        let mut by_block: std::collections::BTreeMap<usize, Vec<(usize, usize, f64)>> =
            Default::default();
        for &(b, i, j, v) in a.entries() {
            let e = by_block.entry(b).or_default();
            e.push((i, j, v));
            if i != j {
                e.push((j, i, v));
            }
        }
        for (b, e) in by_block {
            per_block[b].push((k, e));
        }
    }
    per_block
}

/// `M_ij = Tr(A_i X A_j Z⁻¹)`.
fn schur_matrix(m: usize, expanded: &BlockEntries, x: &[DMatrix<f64>], zinv: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, m);
    for (b, list) in expanded.iter().enumerate() {
        let (xb, zb) = (&x[b], &zinv[b]);
        for (s, (i, ei)) in list.iter().enumerate() {
            for (j, ej) in &list[s..] {
                let mut acc = 0.0;
                for &(p, q, a) in ei {
                    for &(r, t, c) in ej {
                        acc += a * c * xb[(q, r)] * zb[(t, p)];
                    }
                }
                out[(*i, *j)] += acc;
                if i != j {
                    out[(*j, *i)] += acc;
                }
            }
        }
    }
    sym(&out)
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    z: Vec<DMatrix<f64>>,
}

struct Measures {
    pobj: f64,
    dobj: f64,
    pinf: f64,
    dinf: f64,
    gap: f64,
}

impl Measures {
    fn merit(&self) -> f64 {
        self.pinf.max(self.dinf).max(self.gap)
    }
}

fn initial_point(p: &SdpProblem, c: &[DMatrix<f64>]) -> Iterate {
    let a_norms_per_block: Vec<Vec<f64>> = {
        let mut v = vec![vec![0.0; p.num_constraints()]; p.block_dims().len()];
        for (k, a) in p.constraints().iter().enumerate() {
            for &(b, i, j, val) in a.entries() {
                v[b][k] += if i == j { val * val } else { 2.0 * val * val };
            }
        }
        v.into_iter().map(|r| r.into_iter().map(f64::sqrt).collect()).collect()
    };
    let mut x = Vec::new();
    let mut z = Vec::new();
    for (b, &n) in p.block_dims().iter().enumerate() {
        let nf = n as f64;
        let mut xi = 10f64.max(nf.sqrt());
        let mut eta = 10f64.max(nf.sqrt()).max(c[b].norm());
        for (k, &an) in a_norms_per_block[b].iter().enumerate() {
            xi = xi.max(nf * (1.0 + p.rhs()[k].abs()) / (1.0 + an));
            eta = eta.max(an);
        }
        x.push(DMatrix::identity(n, n) * xi);
        z.push(DMatrix::identity(n, n) * eta);
    }
    Iterate {
        x,
        y: DVector::zeros(p.num_constraints()),
        z,
    }
}

pub fn solve(p: &SdpProblem, settings: &Settings) -> SdpSolution {
    let n_total = p.order() as f64;
    let c = p.objective().to_dense(p.block_dims());
    let b = DVector::from_column_slice(p.rhs());
    let b_norm = b.norm();
    let c_norm = frob(&c);
    let expanded = expand(p);
    let tol = settings.tol;

    let mut it = initial_point(p, &c);
    let mut trace = Vec::new();
    let mut best: Option<(Measures, Iterate)> = None;
    let mut certificate = None;
    let mut since_improvement = 0;
    let mut iterations = 0;

    for iter in 0..=settings.max_iter {
        iterations = iter;
        let ax = p.apply(&it.x);
        let rp = &b - &ax;
        let aty = p.adjoint(&it.y);
        let rd: Vec<DMatrix<f64>> = c
            .iter()
            .zip(&aty)
            .zip(&it.z)
            .map(|((c, a), z)| c - a - z)
            .collect();
        let pobj = dot(&c, &it.x);
        let dobj = b.dot(&it.y);
        let xz = dot(&it.x, &it.z);
        let meas = Measures {
            pobj,
            dobj,
            pinf: rp.norm() / (1.0 + b_norm),
            dinf: frob(&rd) / (1.0 + c_norm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        trace.push(IterateRecord {
            iteration: iter,
            primal_objective: pobj,
            dual_objective: dobj,
            complementarity: xz,
            dual_residual_dot: dot(&rd, &it.x),
            primal_residual_dot: it.y.dot(&rp),
            primal_infeasibility: meas.pinf,
            dual_infeasibility: meas.dinf,
        });

        let improved = best.as_ref().is_none_or(|(bm, _)| meas.merit() < 0.9 * bm.merit());
        let done = meas.pinf <= 0.1 * tol && meas.dinf <= 0.1 * tol && meas.gap <= tol;
        if improved || done {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if best.as_ref().is_none_or(|(bm, _)| meas.merit() <= bm.merit()) {
            best = Some((
                meas,
                Iterate {
                    x: it.x.clone(),
                    y: it.y.clone(),
                    z: it.z.clone(),
                },
            ));
        }
        if done || iter == settings.max_iter || since_improvement >= 25 {
            break;
        }

        // Farkas ray: b·y → +∞ while Aᵀy stays negative semidefinite.
        if dobj > 1e8 * (1.0 + c_norm) {
            let yhat = &it.y / dobj;
            let aty_hat = p.adjoint(&yhat);
            let worst = aty_hat
                .iter()
                .map(|a| a.symmetric_eigenvalues().max())
                .fold(f64::NEG_INFINITY, f64::max);
            if worst <= 1e-8 * (1.0 + yhat.norm()) {
                certificate = Some(yhat);
                break;
            }
        }

        let Some(step) = newton_step(p, &expanded, &it, &rp, &rd, xz / n_total, settings) else {
            break;
        };
        let (dx, dy, dz, ap, ad) = step;
        for (x, d) in it.x.iter_mut().zip(&dx) {
            *x = sym(&(&*x + d * ap));
        }
        it.y += dy * ad;
        for (z, d) in it.z.iter_mut().zip(&dz) {
            *z = sym(&(&*z + d * ad));
        }
        if ap.max(ad) < 1e-12 {
            break;
        }
    }

    let (meas, best_it) = best.expect("at least one iterate");
    let status = if certificate.is_some() {
        Status::InfeasibleCertificate
    } else if meas.pinf <= tol && meas.dinf <= tol && meas.gap <= 10.0 * tol {
        Status::Optimal
    } else {
        Status::IterationCap
    };
    SdpSolution {
        status,
        x: best_it.x,
        y: best_it.y,
        z: best_it.z,
        primal_objective: meas.pobj,
        dual_objective: meas.dobj,
        primal_infeasibility: meas.pinf,
        dual_infeasibility: meas.dinf,
        relative_gap: meas.gap,
        iterations,
        trace,
        certificate,
    }
}

type Step = (Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>, f64, f64);

fn newton_step(
    p: &SdpProblem,
    expanded: &BlockEntries,
    it: &Iterate,
    rp: &DVector<f64>,
    rd: &[DMatrix<f64>],
    mu: f64,
    settings: &Settings,
) -> Option<Step> {
    let n_total = p.order() as f64;
    let lx: Vec<DMatrix<f64>> = it
        .x
        .iter()
        .map(|x| x.clone().cholesky().map(|c| c.l()))
        .collect::<Option<_>>()?;
    let zchol: Vec<_> = it
        .z
        .iter()
        .map(|z| z.clone().cholesky())
        .collect::<Option<_>>()?;
    let lz: Vec<DMatrix<f64>> = zchol.iter().map(|c| c.l()).collect();
    let zinv: Vec<DMatrix<f64>> = zchol.iter().map(|c| sym(&c.inverse())).collect();

    let schur = Schur::new(schur_matrix(p.num_constraints(), expanded, &it.x, &zinv))?;
    // X Rd Z⁻¹ is shared by predictor and corrector.
    let x_rd_zinv: Vec<DMatrix<f64>> = it
        .x
        .iter()
        .zip(rd)
        .zip(&zinv)
        .map(|((x, r), zi)| x * r * zi)
        .collect();
    let a_x_rd_zinv = p.apply(&x_rd_zinv);

    // Given R Z⁻¹ (R = target − XZ), returns (dX, dy, dZ).
    let direction = |r_zinv: &[DMatrix<f64>]| -> Option<(Vec<DMatrix<f64>>, DVector<f64>, Vec<DMatrix<f64>>)> {
        let h = rp - p.apply(r_zinv) + &a_x_rd_zinv;
        let dy = schur.solve(&h)?;
        let atdy = p.adjoint(&dy);
        let dz: Vec<DMatrix<f64>> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
        let dx: Vec<DMatrix<f64>> = r_zinv
            .iter()
            .zip(&it.x)
            .zip(&dz)
            .zip(&zinv)
            .map(|(((rz, x), dz), zi)| sym(&(rz - x * dz * zi)))
            .collect();
        if dy.iter().all(|v| v.is_finite()) {
            Some((dx, dy, dz))
        } else {
            None
        }
    };

    // Predictor: R = −XZ, so R Z⁻¹ = −X.
    let neg_x: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
    let (dxa, _, dza) = direction(&neg_x)?;
    let ap = step_length(&lx, &dxa, 1.0);
    let ad = step_length(&lz, &dza, 1.0);
    let mut mu_aff = 0.0;
    for b in 0..it.x.len() {
        mu_aff += (&it.x[b] + &dxa[b] * ap).dot(&(&it.z[b] + &dza[b] * ad));
    }
    mu_aff /= n_total;
    let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

    // Corrector: R = σμI − XZ − dXa dZa.
    let r_zinv: Vec<DMatrix<f64>> = (0..it.x.len())
        .map(|b| &zinv[b] * (sigma * mu) - &it.x[b] - &dxa[b] * &dza[b] * &zinv[b])
        .collect();
    let (dx, dy, dz) = direction(&r_zinv)?;
    let ap = step_length(&lx, &dx, settings.step_fraction);
    let ad = step_length(&lz, &dz, settings.step_fraction);
    Some((dx, dy, dz, ap, ad))
}
