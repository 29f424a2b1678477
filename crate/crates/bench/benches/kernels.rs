use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use matcube::constants::tau_star_mc;
use matcube::linalg::{eig_hermitian, haar_unitary, random_hermitian, RandomStream};

fn eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("eig_hermitian");
    for d in [4usize, 16, 64] {
        let h = random_hermitian(d, &mut RandomStream::new(1, 0));
        g.bench_with_input(BenchmarkId::from_parameter(d), &h, |b, h| b.iter(|| eig_hermitian(black_box(h)).unwrap()));
    }
    g.finish();
}

fn haar(c: &mut Criterion) {
    let mut r = RandomStream::new(2, 0);
    c.bench_function("haar_unitary/4", |b| b.iter(|| haar_unitary(black_box(4), &mut r)));
}

fn tau_mc(c: &mut Criterion) {
    let mut g = c.benchmark_group("tau_star_mc");
    g.sample_size(10);
    for d in [4usize, 8] {
        let rng = RandomStream::new(3, d as u64);
        g.bench_with_input(BenchmarkId::new("100k", d), &d, |b, &d| b.iter(|| tau_star_mc(d, 100_000, &rng).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, eig, haar, tau_mc);
criterion_main!(benches);
