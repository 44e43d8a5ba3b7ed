//! Benchmark harness: seeded workload generators, memory / throughput /
//! stability measurements and their reports.

mod gen;
mod harness;
mod report;

pub use gen::{
    gen_constant, gen_mobility, gen_piecewise_linear, gen_random, DwellSpec, SyntheticTrace,
    Workload, RANDOM_RANGE,
};
pub use harness::{
    bench_memory, bench_stability, bench_throughput, ThroughputConfig, FOOTPRINT_EVERY,
    POLY_INSERTS, REPETITIONS, TIMING_BATCH,
};
pub use report::{BenchReport, FootprintPoint, ModelSpan, Timing};
