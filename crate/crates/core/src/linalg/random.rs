//! Seeded random streams and the Gaussian / Haar samplers built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::matrix::{c, ComplexMatrix, C64};

/// A reproducible random source identified by `(seed, stream)`.
///
/// Streams with the same seed but different ids use disjoint ChaCha streams.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Child stream `k`; depends only on `(seed, stream, k)`, not on how many
    /// draws the parent has made.
    pub fn split(&self, k: u64) -> Self {
        Self::new(self.seed, splitmix64(self.stream ^ splitmix64(k.wrapping_add(1))))
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

/// Entries `(x + iy)/√2` with `x, y` independent standard normals, so `E|z_j|² = 1`.
pub fn complex_gaussian_vector(d: usize, rng: &mut RandomStream) -> Vec<C64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    (0..d)
        .map(|_| {
            let x = rng.normal();
            let y = rng.normal();
            c(x * r, y * r)
        })
        .collect()
}

/// Uniformly distributed unit vector in `C^d`.
pub fn random_unit_vector(d: usize, rng: &mut RandomStream) -> Vec<C64> {
    loop {
        let v = complex_gaussian_vector(d, rng);
        let n = super::matrix::norm2(&v);
        if n > 1e-300 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-distributed unitary: Ginibre sample, Householder QR, and column phases
/// multiplied by `r_ii/|r_ii|` so the distribution is exactly invariant.
pub fn haar_unitary(d: usize, rng: &mut RandomStream) -> ComplexMatrix {
    let g: Vec<C64> = complex_gaussian_vector(d * d, rng);
    let mut a = ComplexMatrix::from_vec(d, d, g).expect("finite Gaussian sample");
    let mut q = ComplexMatrix::identity(d);
    for k in 0..d {
        let x: Vec<C64> = (k..d).map(|i| a[(i, k)]).collect();
        let alpha = super::matrix::norm2(&x);
        if alpha == 0.0 {
            continue;
        }
        let x0 = x[0];
        let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { c(1.0, 0.0) };
        // v = x + e^{iθ}‖x‖ e_1 maps x onto −e^{iθ}‖x‖ e_1
        let mut v = x;
        v[0] += ph * alpha;
        let vn = super::matrix::norm2(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A ← (I − 2vv†) A on rows k..d
        for j in 0..d {
            let s: C64 = (k..d).map(|i| v[i - k].conj() * a[(i, j)]).sum();
            for i in k..d {
                a[(i, j)] -= v[i - k] * s * 2.0;
            }
        }
        // Q ← Q (I − 2vv†) on columns k..d
        for i in 0..d {
            let s: C64 = (k..d).map(|j| q[(i, j)] * v[j - k]).sum();
            for j in k..d {
                q[(i, j)] -= s * v[j - k].conj() * 2.0;
            }
        }
    }
    for k in 0..d {
        let r = a[(k, k)];
        let ph = if r.norm() > 0.0 { r / r.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= ph;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_reproduce() {
        let mut a = RandomStream::new(7, 3);
        let mut b = RandomStream::new(7, 3);
        let xa: Vec<u64> = (0..16).map(|_| a.normal().to_bits()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.normal().to_bits()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn streams_differ() {
        let mut a = RandomStream::new(7, 3);
        let mut b = RandomStream::new(7, 4);
        assert_ne!(a.normal(), b.normal());
    }

    #[test]
    fn split_ignores_parent_position() {
        let a = RandomStream::new(1, 0);
        let mut b = a.clone();
        b.normal();
        assert_eq!(a.split(5).normal(), b.split(5).normal());
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = RandomStream::new(11, 0);
        for d in 1..6 {
            let u = haar_unitary(d, &mut rng);
            let e = (&u.adjoint().matmul(&u).unwrap() - &ComplexMatrix::identity(d)).max_abs();
            assert!(e <= 1e-10, "d={d} err={e}");
        }
    }
}
