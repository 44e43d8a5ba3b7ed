use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn flair(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flair"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok_json(dir: &Path, args: &[&str]) -> Value {
    let out = flair(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) {
    fs::write(dir.path().join(name), text).unwrap();
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout).lines().map(str::to_owned).collect()
}

#[test]
fn constant_stream_compresses_fully() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("t,x\n");
    for i in 0..5000 {
        csv.push_str(&format!("{i},3.5\n"));
    }
    write(&dir, "c.csv", &csv);
    let v = ok_json(dir.path(), &["model", "c.csv", "--epsilon", "0.01"]);
    assert_eq!(v["n"], 5000);
    assert_eq!(v["breakpoints"], 1);
    assert!(v["gain_percent"].as_f64().unwrap() > 99.9);
    assert_eq!(v["mae"].as_f64().unwrap(), 0.0);
}

#[test]
fn piecewise_stream_needs_at_most_three_breakpoints() {
    let dir = TempDir::new().unwrap();
    let out = flair(dir.path(), &["gen", "stream", "--workload", "piecewise", "--n", "6000", "--seed", "9", "--out", "p.csv"]);
    assert!(out.status.success());
    for eps in ["0.001", "0.1"] {
        let v = ok_json(dir.path(), &["model", "p.csv", "--epsilon", eps]);
        assert!(v["breakpoints"].as_u64().unwrap() <= 3);
        assert!(v["mae"].as_f64().unwrap() <= eps.parse::<f64>().unwrap());
        assert!(v["max_error"].as_f64().unwrap() <= eps.parse::<f64>().unwrap());
    }
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    write(&dir, "bad.csv", "t,x\n0,1\n1,oops\n");
    for args in [
        vec!["model", "bad.csv", "--epsilon", "1"],
        vec!["tune", "bad.csv"],
    ] {
        let out = flair(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    }
    write(&dir, "bad_trace.csv", "t,lat,lon\n0,45\n");
    for args in [vec!["attack", "bad_trace.csv"], vec!["protect", "bad_trace.csv"]] {
        assert_eq!(flair(dir.path(), &args).status.code(), Some(2));
    }
    write(&dir, "bad.model", "# flair-model v1 2\n0 0\n");
    assert_eq!(flair(dir.path(), &["read", "bad.model", "1"]).status.code(), Some(2));
    assert_eq!(flair(dir.path(), &["model", "missing.csv", "--epsilon", "1"]).status.code(), Some(2));
    assert_eq!(flair(dir.path(), &["model"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    write(&dir, "s.csv", "t,x\n0,0\n1,1\n");
    assert_eq!(flair(dir.path(), &["model", "s.csv", "--epsilon", "0"]).status.code(), Some(1));
    assert_eq!(flair(dir.path(), &["model", "s.csv", "--epsilon=-1"]).status.code(), Some(1));
    write(&dir, "desc.csv", "t,x\n1,0\n0,1\n");
    assert_eq!(flair(dir.path(), &["model", "desc.csv", "--epsilon", "1"]).status.code(), Some(1));
    write(&dir, "one.csv", "t,x\n0,0\n");
    assert_eq!(flair(dir.path(), &["tune", "one.csv"]).status.code(), Some(1));
    assert_eq!(flair(dir.path(), &["bench", "--store", "sqlite"]).status.code(), Some(1));
    assert_eq!(flair(dir.path(), &["bench", "--workload", "noise"]).status.code(), Some(1));
    write(&dir, "short.csv", "t,lat,lon\n0,45,5\n");
    assert_eq!(flair(dir.path(), &["protect", "short.csv"]).status.code(), Some(1));
    write(&dir, "tr.csv", "t,lat,lon\n0,45,5\n10,45.001,5\n");
    assert_eq!(flair(dir.path(), &["attack", "tr.csv", "--d-max=-5"]).status.code(), Some(1));
    assert_eq!(flair(dir.path(), &["attack", "tr.csv", "--merge-radius", "0"]).status.code(), Some(1));
}

#[test]
fn read_forward_historical_and_out_of_range() {
    let dir = TempDir::new().unwrap();
    write(&dir, "s.csv", "t,x\n0,0\n1,0\n2,10\n");
    let out = flair(dir.path(), &["model", "s.csv", "--epsilon", "1", "--out", "m.txt"]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("m.txt")).unwrap(), "# flair-model v1 3\n0 0\n1 0\n## 10 9 11 2 10\n");

    let out = flair(dir.path(), &["read", "m.txt", "0.5", "2", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out), ["0", "10", "20"]);

    let out = flair(dir.path(), &["read", "m.txt", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tune_reports_percentiles_and_cdf() {
    let dir = TempDir::new().unwrap();
    // Drifts 1, 2, …, 100.
    let mut csv = String::from("t,x\n0,0\n");
    let mut x = 0;
    for i in 1..=100 {
        x += i;
        csv.push_str(&format!("{i},{x}\n"));
    }
    write(&dir, "d.csv", &csv);
    let v = ok_json(dir.path(), &["tune", "d.csv", "--cdf", "cdf.csv"]);
    assert_eq!((v["p90"].as_f64(), v["p95"].as_f64(), v["p99"].as_f64()), (Some(90.0), Some(95.0), Some(99.0)));
    let cdf = fs::read_to_string(dir.path().join("cdf.csv")).unwrap();
    let lines: Vec<&str> = cdf.lines().collect();
    assert_eq!(lines[0], "drift,fraction");
    assert_eq!(lines.len(), 101);
    assert_eq!(*lines.last().unwrap(), "100,1");
}

#[test]
fn two_dwells_give_two_pois_with_either_engine() {
    let dir = TempDir::new().unwrap();
    for seed in ["1", "2", "3"] {
        assert!(flair(dir.path(), &["gen", "trace", "--dwells", "2", "--seed", seed, "--out", "tr.csv"]).status.success());
        let flags = ["--t-min", "900", "--d-max", "200", "--s-max", "256", "--merge-radius", "200"];
        let mut results = Vec::new();
        for engine in [&["--engine", "linear"][..], &["--engine", "divided"], &["--engine", "divided", "--parallel"]] {
            let mut args = vec!["attack", "tr.csv"];
            args.extend(engine);
            args.extend(flags);
            let v = ok_json(dir.path(), &args);
            let pois = v.as_array().unwrap().clone();
            assert_eq!(pois.len(), 2, "seed {seed} {engine:?}");
            for p in &pois {
                assert!(p["n_stays"].as_u64().unwrap() >= 1);
                assert!(p["t_total_seconds"].as_f64().unwrap() >= 900.0);
            }
            results.push(pois);
        }
        assert_eq!(results[1], results[2]);
    }
}

#[test]
fn fast_trace_has_no_pois() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("t,lat,lon\n");
    for i in 0..3000 {
        // About 22 m/s due north.
        csv.push_str(&format!("{i},{},5\n", 45.0 + i as f64 * 0.0002));
    }
    write(&dir, "fast.csv", &csv);
    for engine in ["linear", "divided"] {
        let v = ok_json(dir.path(), &["attack", "fast.csv", "--engine", engine]);
        assert_eq!(v.as_array().unwrap().len(), 0);
    }
}

#[test]
fn protect_hides_pois_and_keeps_contract() {
    let dir = TempDir::new().unwrap();
    assert!(flair(dir.path(), &["gen", "trace", "--dwells", "3", "--seed", "8", "--out", "tr.csv"]).status.success());
    let out = flair(dir.path(), &["protect", "tr.csv", "--delta", "200", "--out", "p.csv"]);
    assert!(out.status.success());
    let parse = |name: &str| -> Vec<(f64, f64, f64)> {
        fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
                (f[0], f[1], f[2])
            })
            .collect()
    };
    let (input, protected) = (parse("tr.csv"), parse("p.csv"));
    assert_eq!(input[0], protected[0]);
    assert_eq!(input.last().unwrap().0, protected.last().unwrap().0);

    let v = ok_json(dir.path(), &["attack", "p.csv"]);
    assert_eq!(v.as_array().unwrap().len(), 0);

    let audit = ok_json(dir.path(), &["audit", "tr.csv", "--engine", "divided"]);
    assert_eq!(audit["pois_before"].as_array().unwrap().len(), 3);
    assert_eq!(audit["pois_after"].as_array().unwrap().len(), 0);
    assert_eq!(audit["points_out"].as_u64().unwrap() as usize, protected.len());
}

#[test]
fn bench_reports_and_series() {
    let dir = TempDir::new().unwrap();
    let v = ok_json(dir.path(), &["bench", "--workload", "constant", "--store", "flair", "--n", "50000", "--csv", "fp.csv"]);
    assert_eq!(v["final_footprint_64bit"], 7);
    assert!(v.get("timing").is_none());
    let series = fs::read_to_string(dir.path().join("fp.csv")).unwrap();
    assert_eq!(series.lines().count(), 6);
    assert!(series.lines().skip(1).all(|l| l.split(',').nth(1) == Some("7")));

    let v = ok_json(dir.path(), &["bench", "--metric", "stability", "--workload", "piecewise", "--n", "9000"]);
    let spans = v["stability"].as_array().unwrap();
    assert_eq!(spans.len(), 3);
    assert!(spans.iter().all(|s| s["samples"] == 3000));

    let v = ok_json(dir.path(), &["bench", "--metric", "throughput", "--store", "swab", "--n", "5000", "--reads", "0"]);
    assert!(v["timing"]["insert_iops"].as_f64().unwrap() > 0.0);
    assert!(v["timing"].get("read_iops").unwrap().is_null());

    let out = flair(dir.path(), &["bench", "--metric", "throughput", "--workload", "constant"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generated_inputs_are_seeded() {
    let dir = TempDir::new().unwrap();
    let a = flair(dir.path(), &["gen", "stream", "--n", "100", "--seed", "1"]).stdout;
    let b = flair(dir.path(), &["gen", "stream", "--n", "100", "--seed", "1"]).stdout;
    let c = flair(dir.path(), &["gen", "stream", "--n", "100", "--seed", "2"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(String::from_utf8(a).unwrap().starts_with("t,x\n"));
    let t = flair(dir.path(), &["gen", "trace", "--seed", "1"]).stdout;
    assert!(String::from_utf8(t).unwrap().starts_with("t,lat,lon\n"));
}
