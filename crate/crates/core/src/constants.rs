//! The matrix-cube inclusion constant τ*(d) in closed form and by Monte Carlo.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian_vector, RandomStream};

pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const MAX_MC_DIM: usize = 32;
/// `τ*(d)` is exact in `u128` arithmetic up to this dimension.
pub const MAX_CLOSED_DIM: usize = 121;

const CHUNK: usize = 4096;

/// Monte-Carlo estimate; `stderr` is the sample standard deviation over `√samples`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauEstimate {
    pub d: usize,
    pub k_argmin: usize,
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `τ*(d) = C(2n, n) / 4^n` with `n = ⌊d/2⌋`.
pub fn tau_star_closed(d: usize) -> Result<Ratio<u128>> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if d > MAX_CLOSED_DIM {
        return Err(Error::Guard {
            what: "d for exact τ*",
            value: d,
            limit: MAX_CLOSED_DIM,
        });
    }
    // C(2n,n)/4^n = Π_{k=1}^{n} (2k−1)/(2k)
    let n = (d / 2) as u128;
    let mut r = Ratio::from_integer(1u128);
    for k in 1..=n {
        r *= Ratio::new(2 * k - 1, 2 * k);
    }
    Ok(r)
}

pub fn tau_star(d: usize) -> Result<f64> {
    let r = tau_star_closed(d)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// `τ*(d)·√(πd/2)`, which tends to 1.
pub fn tau_asymptotic_ratio(d: usize) -> Result<f64> {
    Ok(tau_star(d)? * (std::f64::consts::PI * d as f64 / 2.0).sqrt())
}

/// Per-sample statistics accumulated over parallel chunks, each on its own
/// split stream, reduced in chunk order.
fn monte_carlo<F>(samples: usize, rng: &RandomStream, width: usize, f: F) -> Vec<(f64, f64)>
where
    F: Fn(&mut RandomStream, &mut [f64]) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.split(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut sum = vec![0.0; width];
            let mut sq = vec![0.0; width];
            let mut buf = vec![0.0; width];
            for _ in 0..n {
                f(&mut r, &mut buf);
                for k in 0..width {
                    sum[k] += buf[k];
                    sq[k] += buf[k] * buf[k];
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; width];
    let mut sq = vec![0.0; width];
    for (s, q) in partial {
        for k in 0..width {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let n = samples as f64;
    (0..width)
        .map(|k| {
            let mean = sum[k] / n;
            let var = ((sq[k] - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
            (mean, (var / n).sqrt())
        })
        .collect()
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    Ok(())
}

/// `H(b) = E|Σ b_i |z_i|²|` for standard complex Gaussian `z`.
pub fn h_functional_mc(b: &[f64], samples: usize, rng: &RandomStream) -> Result<TauEstimate> {
    check_samples(samples)?;
    let l1: f64 = b.iter().map(|x| x.abs()).sum();
    if b.is_empty() || (l1 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("‖b‖₁ = {l1}, expected 1")));
    }
    let d = b.len();
    let est = monte_carlo(samples, rng, 1, |r, out| {
        let z = complex_gaussian_vector(d, r);
        out[0] = z.iter().zip(b).map(|(z, bi)| bi * z.norm_sqr()).sum::<f64>().abs();
    });
    Ok(TauEstimate {
        d,
        k_argmin: b.iter().filter(|&&x| x > 0.0).count(),
        value: est[0].0,
        stderr: est[0].1,
        samples,
    })
}

/// `H(ε^A/d)` for `k = 0..=d` positive entries, all from the same Gaussian draws.
pub fn vertex_values_mc(d: usize, samples: usize, rng: &RandomStream) -> Result<Vec<TauEstimate>> {
    check_samples(samples)?;
    if d == 0 || d > MAX_MC_DIM {
        return Err(Error::Guard {
            what: "d for Monte-Carlo τ*",
            value: d,
            limit: MAX_MC_DIM,
        });
    }
    let inv = 1.0 / d as f64;
    let est = monte_carlo(samples, rng, d + 1, |r, out| {
        let z = complex_gaussian_vector(d, r);
        let total: f64 = z.iter().map(|z| z.norm_sqr()).sum();
        let mut prefix = 0.0;
        out[0] = total * inv;
        for k in 1..=d {
            prefix += z[k - 1].norm_sqr();
            out[k] = (2.0 * prefix - total).abs() * inv;
        }
    });
    Ok(est
        .into_iter()
        .enumerate()
        .map(|(k, (value, stderr))| TauEstimate {
            d,
            k_argmin: k,
            value,
            stderr,
            samples,
        })
        .collect())
}

/// Minimum of `H` over the cross-polytope vertices classes; `k_argmin` is the
/// number of positive entries at the minimizer.
pub fn tau_star_mc(d: usize, samples: usize, rng: &RandomStream) -> Result<TauEstimate> {
    let vals = vertex_values_mc(d, samples, rng)?;
    Ok(vals
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("d ≥ 1"))
}

/// `E|D_{s,t}|` with `D_{s,t} = Σ_{i≤2s} x_i² − Σ_{j≤2t} y_j²` for standard real normals.
pub fn abs_chi2_diff_mc(s: usize, t: usize, samples: usize, rng: &RandomStream) -> Result<TauEstimate> {
    check_samples(samples)?;
    let est = monte_carlo(samples, rng, 1, |r, out| {
        let mut acc = 0.0;
        for _ in 0..2 * s {
            let x = r.normal();
            acc += x * x;
        }
        for _ in 0..2 * t {
            let y = r.normal();
            acc -= y * y;
        }
        out[0] = acc.abs();
    });
    Ok(TauEstimate {
        d: s + t,
        k_argmin: s,
        value: est[0].0,
        stderr: est[0].1,
        samples,
    })
}

/// A direction `s ∈ [0,1]^g`.
#[derive(Clone, Debug)]
pub struct QuarterCircleQuery {
    s: Vec<f64>,
}

impl QuarterCircleQuery {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidArgument("components must lie in [0, 1]".into()));
        }
        Ok(Self { s })
    }

    pub fn components(&self) -> &[f64] {
        &self.s
    }
}

/// `Σ s_i² ≤ 1`.
pub fn quarter_circle_contains(q: &QuarterCircleQuery) -> bool {
    q.s.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12
}
