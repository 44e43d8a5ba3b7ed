use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen::gen_random;
use super::report::{BenchReport, FootprintPoint, ModelSpan, Timing};
use crate::error::{Error, Result};
use crate::sample::{Epsilon, Sample};
use crate::store::{Store, StoreKind};

/// Footprint checkpoint interval, in inserts.
pub const FOOTPRINT_EVERY: usize = 10_000;
/// Operations per timed batch.
pub const TIMING_BATCH: usize = 10_000;
/// Throughput runs are repeated and averaged.
pub const REPETITIONS: usize = 4;
/// Insert count for the polynomial store, whatever was requested.
pub const POLY_INSERTS: usize = 10_000;

fn gain_percent(footprint: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * (1.0 - footprint as f64 / (2 * n) as f64)
    }
}

/// Inserts `stream` into `store`, recording the footprint every
/// [`FOOTPRINT_EVERY`] inserts and after the last one.
pub fn bench_memory(store: &mut dyn Store, stream: &[Sample], workload: &str, epsilon: f64) -> Result<BenchReport> {
    let mut report = BenchReport::new(store.name(), workload, epsilon);
    for (i, s) in stream.iter().enumerate() {
        store.insert(*s)?;
        let n = i + 1;
        if n.is_multiple_of(FOOTPRINT_EVERY) {
            report.footprint_series.push(FootprintPoint {
                n,
                footprint_64bit: store.footprint_64bit(),
                raw_footprint_64bit: 2 * n,
            });
        }
    }
    let n = stream.len();
    if !n.is_multiple_of(FOOTPRINT_EVERY) {
        report.footprint_series.push(FootprintPoint {
            n,
            footprint_64bit: store.footprint_64bit(),
            raw_footprint_64bit: 2 * n,
        });
    }
    report.n_inserted = n;
    report.final_footprint_64bit = store.footprint_64bit();
    report.gain_percent = gain_percent(report.final_footprint_64bit, n);
    Ok(report)
}

/// Inserts and finalizes `stream`, then reports how many samples and seconds
/// each model piece covers.
pub fn bench_stability(store: &mut dyn Store, stream: &[Sample], workload: &str, epsilon: f64) -> Result<BenchReport> {
    let mut report = BenchReport::new(store.name(), workload, epsilon);
    for s in stream {
        store.insert(*s)?;
    }
    store.finalize()?;
    let starts = store.model_starts();
    let mut idx = 0;
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(f64::INFINITY);
        while idx < stream.len() && stream[idx].t < start {
            idx += 1;
        }
        let first = idx;
        while idx < stream.len() && stream[idx].t < end {
            idx += 1;
        }
        let samples = idx - first;
        let duration = if samples > 0 { stream[idx - 1].t - start } else { 0.0 };
        report.stability.push(ModelSpan { samples, duration });
    }
    report.n_inserted = stream.len();
    report.final_footprint_64bit = store.footprint_64bit();
    report.gain_percent = gain_percent(report.final_footprint_64bit, stream.len());
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct ThroughputConfig {
    pub n_insert: usize,
    pub n_reads: usize,
    pub seed: u64,
    pub repetitions: usize,
}

impl ThroughputConfig {
    pub fn new(n_insert: usize, n_reads: usize, seed: u64) -> Self {
        ThroughputConfig {
            n_insert,
            n_reads,
            seed,
            repetitions: REPETITIONS,
        }
    }
}

fn time_batches<T>(items: &[T], mut op: impl FnMut(&T) -> Result<()>) -> Result<Duration> {
    let mut total = Duration::ZERO;
    for batch in items.chunks(TIMING_BATCH) {
        let start = Instant::now();
        for item in batch {
            op(item)?;
        }
        total += start.elapsed();
    }
    Ok(total)
}

fn iops(ops: usize, elapsed: Duration) -> f64 {
    ops as f64 / elapsed.as_secs_f64().max(1e-12)
}

/// Sequential inserts of uniform random samples, then uniformly random
/// historical reads, repeated and averaged. The polynomial store always gets
/// [`POLY_INSERTS`] inserts. Buffered stores are finalized before reads are
/// timed.
pub fn bench_throughput(kind: StoreKind, epsilon: Epsilon, config: ThroughputConfig) -> Result<BenchReport> {
    if config.n_insert == 0 || config.repetitions == 0 {
        return Err(Error::InvalidParameter("throughput needs inserts and repetitions".into()));
    }
    let n_insert = if kind == StoreKind::Poly { POLY_INSERTS } else { config.n_insert };
    let stream = gen_random(n_insert, config.seed);
    let t_max = stream.last().unwrap().t;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed);
    let queries: Vec<f64> = (0..config.n_reads).map(|_| rng.random_range(0.0..=t_max)).collect();

    let mut report = BenchReport::new(kind.as_str(), "random", epsilon.value());
    let (mut insert_sum, mut read_sum) = (0.0, 0.0);
    for _ in 0..config.repetitions {
        let mut store = kind.build(epsilon);
        let elapsed = time_batches(&stream, |s| store.insert(*s))?;
        insert_sum += iops(n_insert, elapsed);
        store.finalize()?;
        if !queries.is_empty() {
            let elapsed = time_batches(&queries, |&t| {
                black_box(store.read(black_box(t))?);
                Ok(())
            })?;
            read_sum += iops(queries.len(), elapsed);
        }
        report.final_footprint_64bit = store.footprint_64bit();
    }
    let reps = config.repetitions as f64;
    report.n_inserted = n_insert;
    report.gain_percent = gain_percent(report.final_footprint_64bit, n_insert);
    report.timing = Some(Timing {
        n_insert,
        n_reads: queries.len(),
        repetitions: config.repetitions,
        insert_iops: insert_sum / reps,
        read_iops: (!queries.is_empty()).then(|| read_sum / reps),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen::{gen_constant, gen_piecewise_linear};
    use crate::competitors::SwabStore;
    use crate::flair::FlairModel;
    use crate::store::RawStore;

    fn eps(v: f64) -> Epsilon {
        Epsilon::new(v).unwrap()
    }

    #[test]
    fn constant_footprint_is_flat() {
        let stream = gen_constant(50_000, 3.0);
        let mut m = FlairModel::new(eps(0.01));
        let r = bench_memory(&mut m, &stream, "constant", 0.01).unwrap();
        assert_eq!(r.footprint_series.len(), 5);
        assert!(r.footprint_series.iter().all(|p| p.footprint_64bit == 7));
        assert!(r.gain_percent > 99.9);
    }

    #[test]
    fn raw_store_grows_two_words_per_sample() {
        let stream = gen_random(25_000, 1);
        let mut raw = RawStore::new();
        let r = bench_memory(&mut raw, &stream, "random", 0.01).unwrap();
        let ns: Vec<usize> = r.footprint_series.iter().map(|p| p.n).collect();
        assert_eq!(ns, vec![10_000, 20_000, 25_000]);
        assert!(r.footprint_series.iter().all(|p| p.footprint_64bit == 2 * p.n));
        assert_eq!(r.gain_percent, 0.0);
    }

    #[test]
    fn random_flair_grows_linearly() {
        let stream = gen_random(40_000, 2);
        let mut m = FlairModel::new(eps(0.01));
        let r = bench_memory(&mut m, &stream, "random", 0.01).unwrap();
        let f: Vec<usize> = r.footprint_series.iter().map(|p| p.footprint_64bit).collect();
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        let step = (f[3] - f[0]) as f64 / 3.0;
        assert!(step > 15_000.0, "{step}");
    }

    #[test]
    fn stability_counts() {
        let stream = gen_constant(1000, 2.0);
        let mut m = FlairModel::new(eps(0.01));
        let r = bench_stability(&mut m, &stream, "constant", 0.01).unwrap();
        assert_eq!(r.stability, vec![ModelSpan { samples: 1000, duration: 999.0 }]);

        let stream = gen_piecewise_linear(3000, 3, 5);
        let mut m = FlairModel::new(eps(0.01));
        let r = bench_stability(&mut m, &stream, "piecewise", 0.01).unwrap();
        let counts: Vec<usize> = r.stability.iter().map(|s| s.samples).collect();
        assert_eq!(counts, vec![1000, 1000, 1000]);

        let stream = gen_random(5000, 5);
        let mut m = FlairModel::new(eps(1e-6));
        let r = bench_stability(&mut m, &stream, "random", 1e-6).unwrap();
        assert!(r.median_samples_per_model().unwrap() <= 4);
        assert_eq!(r.stability.iter().map(|s| s.samples).sum::<usize>(), 5000);
    }

    #[test]
    fn harness_adds_no_behavior() {
        let stream = gen_random(3000, 9);
        let mut via_bench = FlairModel::new(eps(0.5));
        bench_memory(&mut via_bench, &stream, "random", 0.5).unwrap();
        let mut direct = FlairModel::new(eps(0.5));
        direct.extend(stream.iter().copied()).unwrap();
        assert!(via_bench.bit_identical(&direct));

        let mut via_bench = SwabStore::with_window(eps(0.5), 64).unwrap();
        bench_stability(&mut via_bench, &stream, "random", 0.5).unwrap();
        let mut direct = SwabStore::with_window(eps(0.5), 64).unwrap();
        for s in &stream {
            direct.insert(*s).unwrap();
        }
        direct.finalize().unwrap();
        assert_eq!(via_bench.segments(), direct.segments());
    }

    #[test]
    fn throughput_report_shape() {
        let r = bench_throughput(StoreKind::Flair, eps(0.01), ThroughputConfig::new(20_000, 0, 1)).unwrap();
        let t = r.timing.unwrap();
        assert!(t.insert_iops > 0.0);
        assert_eq!(t.read_iops, None);
        assert_eq!(t.repetitions, REPETITIONS);

        let r = bench_throughput(StoreKind::Poly, eps(0.01), ThroughputConfig { repetitions: 1, ..ThroughputConfig::new(50_000, 100, 1) }).unwrap();
        assert_eq!(r.n_inserted, POLY_INSERTS);
        assert!(r.timing.unwrap().read_iops.is_some());
    }
}
