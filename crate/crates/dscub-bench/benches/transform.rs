use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use dscub::{fast_transform, update_pointer, TransformState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::hint::black_box;

fn random_samples(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn bench_fast_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_transform");
    group.sample_size(20);
    for m in [14u32, 16, 18, 20] {
        let n = 1usize << m;
        let data = random_samples(n, m as u64);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(m), &data, |b, data| {
            b.iter(|| fast_transform(black_box(data), 2).unwrap());
        });
    }
    group.finish();
}

fn bench_extend_vs_rebuild(c: &mut Criterion) {
    let mut group = c.benchmark_group("double_sample_size");
    group.sample_size(20);
    for m in [14u32, 16, 18] {
        let n = 1usize << m;
        let data = random_samples(n, 100 + m as u64);
        let half = TransformState::new(&data[..n / 2], 2, 4).unwrap();
        group.bench_with_input(BenchmarkId::new("extend", m), &data, |b, data| {
            b.iter_batched(
                || half.clone(),
                |mut state| {
                    state.extend(&data[n / 2..]).unwrap();
                    state
                },
                criterion::BatchSize::LargeInput,
            );
        });
        group.bench_with_input(BenchmarkId::new("rebuild", m), &data, |b, data| {
            b.iter(|| TransformState::new(black_box(data), 2, 4).unwrap());
        });
    }
    group.finish();
}

fn bench_update_pointer(c: &mut Criterion) {
    let mut group = c.benchmark_group("update_pointer");
    group.sample_size(20);
    for m in [16u32, 18] {
        let n = 1usize << m;
        let state = TransformState::new(&random_samples(n, 200 + m as u64), 2, 4).unwrap();
        let prior: Vec<u32> = (0..n as u32 / 2).collect();
        group.bench_with_input(BenchmarkId::from_parameter(m), &state, |b, state| {
            b.iter(|| update_pointer(black_box(state), black_box(&prior)).unwrap());
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_fast_transform,
    bench_extend_vs_rebuild,
    bench_update_pointer
);
criterion_main!(benches);
