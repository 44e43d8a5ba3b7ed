use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flair_core::bench::gen_random;
use flair_core::{Epsilon, Store, StoreKind};

const N: usize = 10_000;

fn inserts(c: &mut Criterion) {
    let stream = gen_random(N, 1);
    let eps = Epsilon::new(0.01).unwrap();
    let mut group = c.benchmark_group("insert");
    group.throughput(Throughput::Elements(N as u64));
    for kind in StoreKind::ALL {
        group.bench_function(BenchmarkId::from_parameter(kind), |b| {
            b.iter_batched(
                || kind.build(eps),
                |mut store| {
                    for s in &stream {
                        store.insert(*s).unwrap();
                    }
                    store.finalize().unwrap();
                    store
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn reads(c: &mut Criterion) {
    let stream = gen_random(N, 2);
    let eps = Epsilon::new(0.01).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let queries: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..(N - 1) as f64)).collect();
    let mut group = c.benchmark_group("read");
    group.throughput(Throughput::Elements(queries.len() as u64));
    for kind in StoreKind::ALL {
        let mut store: Box<dyn Store> = kind.build(eps);
        for s in &stream {
            store.insert(*s).unwrap();
        }
        store.finalize().unwrap();
        group.bench_function(BenchmarkId::from_parameter(kind), |b| {
            b.iter(|| {
                for &t in &queries {
                    black_box(store.read(black_box(t)).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, inserts, reads);
criterion_main!(benches);
