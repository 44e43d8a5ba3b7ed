use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use flair_core::bench::{
    bench_memory, bench_stability, bench_throughput, gen_mobility, BenchReport, DwellSpec,
    ThroughputConfig, Workload,
};
use flair_core::flair::{deserialize, serialize};
use flair_core::geo::{poi_attack, promesse, AttackParams, Engine, GeoTrace, PromesseParams};
use flair_core::io::{read_samples, read_trace, write_samples, write_trace};
use flair_core::tuning::{drifts, epsilon_candidates};
use flair_core::{Epsilon, Error, FlairModel, Sample, StoreKind};

/// Error-bounded stream modeling and mobility-privacy tools.
#[derive(Parser)]
#[command(name = "flair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a model from a `t,x` CSV and print a summary as JSON.
    Model {
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Model file to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read approximate values from a model file, one per line.
    Read {
        model: PathBuf,
        #[arg(required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
    },
    /// Print the 90/95/99 % ε candidates of a `t,x` CSV as JSON.
    Tune {
        input: PathBuf,
        /// Write the drift CDF as `drift,fraction` CSV.
        #[arg(long)]
        cdf: Option<PathBuf>,
    },
    /// Extract POIs from a `t,lat,lon` CSV and print them as JSON.
    Attack {
        input: PathBuf,
        #[command(flatten)]
        attack: AttackArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resample a trace at constant speed.
    Protect {
        input: PathBuf,
        #[arg(long, default_value_t = 200.0)]
        delta: f64,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attack a trace before and after protection and report both POI sets.
    Audit {
        input: PathBuf,
        #[command(flatten)]
        attack: AttackArgs,
        #[arg(long, default_value_t = 200.0)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark and print the report as JSON.
    Bench {
        #[arg(long, default_value = "random")]
        workload: String,
        #[arg(long, default_value = "flair")]
        store: String,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Metric::Memory)]
        metric: Metric,
        /// Historical reads for the throughput metric.
        #[arg(long, default_value_t = 10_000)]
        reads: usize,
        /// JSON report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV series path (footprint or stability).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate seeded inputs.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// A univariate `t,x` stream.
    Stream {
        #[arg(long, default_value = "random")]
        workload: String,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A synthetic mobility trace with dwells and fast transit legs.
    Trace {
        #[arg(long, default_value_t = 2)]
        dwells: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Linear)]
    engine: EngineArg,
    /// Minimum stay duration, seconds.
    #[arg(long, default_value_t = 900.0)]
    t_min: f64,
    /// Maximum stay radius, meters.
    #[arg(long, default_value_t = 200.0)]
    d_max: f64,
    /// Window size below which the divided engine scans linearly.
    #[arg(long, default_value_t = 256)]
    s_max: usize,
    /// Stay merge distance, meters; defaults to `--d-max`.
    #[arg(long)]
    merge_radius: Option<f64>,
    /// Recurse into both halves concurrently (divided engine).
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Linear,
    Divided,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Memory,
    Stability,
    Throughput,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_parse() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(value: &impl serde::Serialize, path: Option<&Path>) -> Result<(), Error> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Model { input, epsilon, out } => cmd_model(&input, epsilon, out.as_deref()),
        Command::Read { model, t } => cmd_read(&model, &t),
        Command::Tune { input, cdf } => cmd_tune(&input, cdf.as_deref()),
        Command::Attack { input, attack, out } => {
            let trace = read_trace(open(&input)?)?;
            let (records, stats) = attack_trace(&trace, &attack)?;
            eprintln!(
                "{} POIs from {} stays, {} of {} points visited",
                records.len(),
                stats.0,
                stats.1,
                trace.len()
            );
            emit_json(&records, out.as_deref())
        }
        Command::Protect { input, delta, out } => {
            let trace = read_trace(open(&input)?)?;
            let protected = promesse(&trace, &PromesseParams::new(delta)?)?;
            eprintln!("{} points in, {} points out", trace.len(), protected.len());
            let mut w = output(out.as_deref())?;
            write_trace(&mut w, &protected)?;
            w.flush()?;
            Ok(())
        }
        Command::Audit {
            input,
            attack,
            delta,
            out,
        } => {
            let trace = read_trace(open(&input)?)?;
            let (before, _) = attack_trace(&trace, &attack)?;
            let protected = promesse(&trace, &PromesseParams::new(delta)?)?;
            let (after, _) = attack_trace(&protected, &attack)?;
            eprintln!("{} POIs before protection, {} after", before.len(), after.len());
            emit_json(
                &json!({
                    "delta": delta,
                    "points_in": trace.len(),
                    "points_out": protected.len(),
                    "pois_before": before,
                    "pois_after": after,
                }),
                out.as_deref(),
            )
        }
        Command::Bench {
            workload,
            store,
            n,
            seed,
            epsilon,
            metric,
            reads,
            out,
            csv,
        } => cmd_bench(&workload, &store, n, seed, epsilon, metric, reads, out.as_deref(), csv.as_deref()),
        Command::Gen(GenCommand::Stream {
            workload,
            n,
            seed,
            out,
        }) => {
            let stream = workload.parse::<Workload>()?.generate(n, seed);
            let mut w = output(out.as_deref())?;
            write_samples(&mut w, &stream)?;
            w.flush()?;
            Ok(())
        }
        Command::Gen(GenCommand::Trace { dwells, seed, out }) => {
            if dwells == 0 {
                return Err(Error::InvalidParameter("at least one dwell is needed".into()));
            }
            let spec = DwellSpec::default().with_dwells(dwells);
            let trace = gen_mobility(1, &spec, seed).remove(0).trace;
            let mut w = output(out.as_deref())?;
            write_trace(&mut w, &trace)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_model(input: &Path, epsilon: f64, out: Option<&Path>) -> Result<(), Error> {
    let epsilon = Epsilon::new(epsilon)?;
    let samples = read_samples(open(input)?)?;
    let mut model = FlairModel::new(epsilon);
    model.extend(samples.iter().copied())?;
    let (mut abs_sum, mut max_err) = (0.0, 0.0f64);
    for s in &samples {
        let err = (model.read(s.t)? - s.x).abs();
        abs_sum += err;
        max_err = max_err.max(err);
    }
    let n = samples.len();
    let raw = 2 * n;
    let footprint = model.footprint_64bit();
    let gain = if n == 0 { 0.0 } else { 100.0 * (1.0 - footprint as f64 / raw as f64) };
    let mae = if n == 0 { 0.0 } else { abs_sum / n as f64 };
    if let Some(path) = out {
        fs::write(path, serialize(&model)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    eprintln!(
        "{n} samples, {} breakpoints, {footprint} floats stored, gain {gain:.2}%, MAE {mae:.6}",
        model.history().len()
    );
    emit_json(
        &json!({
            "n": n,
            "epsilon": epsilon.value(),
            "breakpoints": model.history().len(),
            "footprint_64bit": footprint,
            "raw_footprint_64bit": raw,
            "gain_percent": gain,
            "mae": mae,
            "max_error": max_err,
        }),
        None,
    )
}

fn cmd_read(path: &Path, ts: &[f64]) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    // Reads do not depend on ε; any valid value restores the state.
    let model = deserialize(&text, Epsilon::new(1.0)?)?;
    let mut out = io::stdout().lock();
    for &t in ts {
        writeln!(out, "{}", model.read(t)?)?;
    }
    Ok(())
}

fn cmd_tune(input: &Path, cdf_path: Option<&Path>) -> Result<(), Error> {
    let samples: Vec<Sample> = read_samples(open(input)?)?;
    let cdf = drifts(&samples)?;
    let c = epsilon_candidates(&cdf)?;
    if let Some(path) = cdf_path {
        let mut w = create(path)?;
        writeln!(w, "drift,fraction")?;
        for (d, f) in cdf.points() {
            writeln!(w, "{d},{f}")?;
        }
        w.flush()?;
    }
    eprintln!("{} drifts; ε candidates {} / {} / {}", cdf.len(), c.p90, c.p95, c.p99);
    emit_json(
        &json!({ "n_drifts": cdf.len(), "p90": c.p90, "p95": c.p95, "p99": c.p99 }),
        None,
    )
}

fn attack_trace(trace: &GeoTrace, args: &AttackArgs) -> Result<(Vec<Value>, (usize, usize)), Error> {
    let params = AttackParams::new(args.t_min, args.d_max, args.s_max)?;
    let engine = match args.engine {
        EngineArg::Linear => Engine::Linear,
        EngineArg::Divided => Engine::Divided,
    };
    let radius = args.merge_radius.unwrap_or(args.d_max);
    let outcome = poi_attack(trace, &params, engine, radius, args.parallel)?;
    let records = outcome
        .pois
        .iter()
        .map(|p| serde_json::to_value(p.record()).expect("record serializes"))
        .collect();
    Ok((records, (outcome.stays.len(), outcome.visited)))
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    workload: &str,
    store: &str,
    n: usize,
    seed: u64,
    epsilon: f64,
    metric: Metric,
    reads: usize,
    out: Option<&Path>,
    csv: Option<&Path>,
) -> Result<(), Error> {
    let workload: Workload = workload.parse()?;
    let kind: StoreKind = store.parse()?;
    let eps = Epsilon::new(epsilon)?;
    let report: BenchReport = match metric {
        Metric::Memory | Metric::Stability => {
            let stream = workload.generate(n, seed);
            let mut s = kind.build(eps);
            if matches!(metric, Metric::Memory) {
                bench_memory(s.as_mut(), &stream, workload.as_str(), epsilon)?
            } else {
                bench_stability(s.as_mut(), &stream, workload.as_str(), epsilon)?
            }
        }
        Metric::Throughput => {
            if workload != Workload::Random {
                return Err(Error::InvalidParameter("throughput runs use the random workload".into()));
            }
            bench_throughput(kind, eps, ThroughputConfig::new(n, reads, seed))?
        }
    };
    if let Some(path) = csv {
        let w = create(path)?;
        match metric {
            Metric::Stability => report.write_stability_csv(w)?,
            _ => report.write_footprint_csv(w)?,
        }
    }
    eprintln!(
        "{} on {} ({} inserts): footprint {} words, gain {:.2}%",
        report.store, report.workload, report.n_inserted, report.final_footprint_64bit, report.gain_percent
    );
    if let Some(t) = &report.timing {
        eprintln!("insert {:.0} ops/s, read {:?} ops/s", t.insert_iops, t.read_iops);
    }
    emit_json(&report, out)
}
