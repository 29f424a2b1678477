use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use matcube::constructions::{net_inequality, pauli_inequality, unitary_net};
use matcube::linalg::RandomStream;
use matcube::spectrahedra::{cube_inclusion, SpectrahedronTuple};
use matcube::steering::{decompose, vq_value};

fn inclusion(c: &mut Criterion) {
    let mut g = c.benchmark_group("cube_inclusion");
    g.sample_size(10);
    for k in [2usize, 3, 5] {
        let f = pauli_inequality(k).unwrap();
        let b = SpectrahedronTuple::monic(decompose(&f).aminus).unwrap();
        g.bench_with_input(BenchmarkId::new("pauli", k), &b, |bch, b| bch.iter(|| cube_inclusion(black_box(b)).unwrap()));
    }
    g.finish();
}

fn values(c: &mut Criterion) {
    let f = pauli_inequality(3).unwrap();
    c.bench_function("vq_value/pauli3", |b| b.iter(|| vq_value(black_box(&f)).unwrap()));
}

fn nets(c: &mut Criterion) {
    let mut g = c.benchmark_group("net_inequality");
    g.sample_size(10);
    let rng = RandomStream::new(4, 0);
    let net = unitary_net(2, 16, 512, &rng).unwrap();
    g.bench_function("K16_grid5", |b| b.iter(|| net_inequality(black_box(&net), 5, &rng).unwrap()));
    g.finish();
}

criterion_group!(benches, inclusion, values, nets);
criterion_main!(benches);
