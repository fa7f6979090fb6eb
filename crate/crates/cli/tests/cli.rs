use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oppenheim"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("oppenheim-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

/// CSV contents with every timing column blanked.
fn without_timings(path: &Path) -> Vec<Vec<String>> {
    let (header, rows) = read_csv(path);
    let timing: Vec<bool> = header.iter().map(|h| h == "elapsed_s").collect();
    rows.into_iter()
        .map(|r| r.into_iter().zip(&timing).map(|(v, &t)| if t { String::new() } else { v }).collect())
        .collect()
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<Vec<String>>> {
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        match p.extension().and_then(|x| x.to_str()) {
            Some("csv") => {
                files.insert(name, without_timings(&p));
            }
            Some("json") if name == "summary.json" => {
                files.insert(name, vec![vec![fs::read_to_string(&p).unwrap()]]);
            }
            _ => {}
        }
    }
    files
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().count() >= 6);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn corrupted_spin_fails_selftest_at_q0() {
    let o = run(&["selftest", "--corrupt-spin"]);
    assert_eq!(code(&o), 1);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let first_fail = stdout.lines().find(|l| l.starts_with("FAIL")).unwrap();
    assert!(first_fail.contains("Q0 preservation"), "{first_fail}");
}

#[test]
fn empty_config_uses_defaults() {
    let dir = scratch("empty");
    let cfg = dir.join("empty.json");
    fs::write(&cfg, "{}").unwrap();
    let o = run(&["selftest", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
}

#[test]
fn config_errors_exit_2() {
    let dir = scratch("cfg");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"t_ratio": 0.5}"#).unwrap();
    let unknown = dir.join("unknown.json");
    fs::write(&unknown, r#"{"no_such_field": 1}"#).unwrap();
    let garbage = dir.join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    let singular = dir.join("singular.json");
    fs::write(&singular, r#"{"g": [[1,0,0],[0,1,0],[0,0,2]]}"#).unwrap();
    let out = dir.to_str().unwrap();
    for (cmd, cfg) in [("sample", &bad), ("sample", &unknown), ("sample", &garbage), ("oppenheim-one", &singular)] {
        let o = run(&[cmd, "--out", out, "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{cmd} {}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr));
    }
    let missing = dir.join("missing.json");
    assert_eq!(code(&run(&["sample", "--config", missing.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["measure", "--out", out, "--samples", "10"])), 2);
    assert_eq!(code(&run(&["oppenheim-scan", "--out", out, "--t-count", "3", "--samples", "1"])), 2);
    assert_eq!(code(&run(&["oppenheim-one", "--out", out, "--tau", "1.5"])), 2);
}

#[test]
fn unwritable_output_exits_3() {
    let dir = scratch("io");
    let blocker = dir.join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&["sample", "--samples", "3", "--out", blocker.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn flags_override_config_file() {
    let dir = scratch("prec");
    let cfg = dir.join("c.json");
    fs::write(&cfg, r#"{"samples": 7, "seed": 11}"#).unwrap();
    let out = dir.to_str().unwrap();
    let o = run(&["sample", "--config", cfg.to_str().unwrap(), "--samples", "4", "--out", out]);
    assert_eq!(code(&o), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("sample/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["samples"], 4);
    assert_eq!(summary["config"]["seed"], 11);
    assert_eq!(summary["n_samples"], 4);
}

#[test]
fn scan_rows_round_trip() {
    let dir = scratch("scan");
    let o = run(&[
        "oppenheim-scan",
        "--samples",
        "2",
        "--t-start",
        "5",
        "--t-ratio",
        "1.5",
        "--t-count",
        "5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.join("oppenheim-scan/forms.csv"));
    let expected: Vec<&str> = vec![
        "form_id",
        "g11",
        "g12",
        "g13",
        "g21",
        "g22",
        "g23",
        "g31",
        "g32",
        "g33",
        "T",
        "min_abs_q",
        "n1",
        "n2",
        "n3",
        "engine",
        "elapsed_s",
    ];
    assert_eq!(header, expected);
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let g: Vec<f64> = r[1..10].iter().map(|x| x.parse().unwrap()).collect();
        let t: f64 = r[10].parse().unwrap();
        let min_abs_q: f64 = r[11].parse().unwrap();
        let n: Vec<f64> = r[12..15].iter().map(|x| x.parse::<i64>().unwrap() as f64).collect();
        // Re-evaluate Q(n) = Q0(n g) from the printed row.
        let v: Vec<f64> = (0..3).map(|j| (0..3).map(|i| n[i] * g[3 * i + j]).sum()).collect();
        let q = v[0] * v[0] + v[1] * v[1] - v[2] * v[2];
        assert!((q.abs() - min_abs_q).abs() <= 1e-9 * (1.0 + q.abs()), "{q} vs {min_abs_q}");
        assert!(n.iter().map(|x| x * x).sum::<f64>() <= t * t + 1e-9);
        assert_eq!(r[15], "direct");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("oppenheim-scan/summary.json")).unwrap()).unwrap();
    for key in ["median_slope", "q25", "q75", "n_forms", "config", "version"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["n_forms"], 2);
}

/// Same seed and configuration with 1 and 4 workers gives identical files.
#[test]
fn results_do_not_depend_on_worker_count() {
    let runs: &[&[&str]] = &[
        &["oppenheim-scan", "--samples", "3", "--t-start", "5", "--t-count", "5"],
        &["oppenheim-scan", "--samples", "2", "--t-start", "5", "--t-count", "5", "--norm", "sup"],
        &["oppenheim-one", "--t-count", "5", "--budget", "300"],
        &["targets-hit", "--samples", "4", "--t-count", "3", "--budget", "500"],
        &["critical-exponent", "--samples", "2", "--t-count", "4", "--budget", "300"],
        &["loglaw-cusp", "--samples", "3", "--t-count", "4", "--budget", "300"],
        &["loglaw-point", "--samples", "2", "--t-count", "4", "--budget", "300"],
        &["met-decay", "--samples", "10", "--t-count", "3", "--config"],
        &["measure", "--samples", "10000"],
        &["sample", "--samples", "20"],
    ];
    let dir = scratch("repro");
    let met_cfg = dir.join("met.json");
    fs::write(&met_cfg, r#"{"ball_samples": 50, "mean_samples": 2000}"#).unwrap();
    for args in runs {
        let mut args: Vec<&str> = args.to_vec();
        if args.last() == Some(&"--config") {
            args.push(met_cfg.to_str().unwrap());
        }
        let mut results = Vec::new();
        for workers in ["1", "4"] {
            let out = dir.join(format!("w{workers}"));
            let mut full = args.clone();
            full.extend(["--seed", "2024", "--workers", workers, "--out", out.to_str().unwrap()]);
            let o = run(&full);
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
            let files = outputs(&out.join(args[0]));
            assert!(files.len() >= 2, "{args:?} wrote {files:?}");
            results.push(files);
        }
        assert_eq!(results[0], results[1], "{args:?}");
    }
}

#[test]
fn seeds_change_results() {
    let dir = scratch("seed");
    let mut seen = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.join(seed);
        assert_eq!(code(&run(&["sample", "--samples", "5", "--seed", seed, "--out", out.to_str().unwrap()])), 0);
        seen.push(without_timings(&out.join("sample/samples.csv")));
    }
    assert_ne!(seen[0], seen[1]);
}

fn summary(dir: &Path, cmd: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(cmd).join("summary.json")).unwrap()).unwrap()
}

#[test]
fn single_form_scan_matches_library_call() {
    use oppenheim_core::forms::{form_from_g, min_form_value_direct, NormChoice};
    use oppenheim_core::linalg::Mat3;

    let dir = scratch("one-form");
    let o = run(&[
        "oppenheim-scan",
        "--samples",
        "1",
        "--t-start",
        "5",
        "--t-ratio",
        "1.5",
        "--t-count",
        "5",
        "--seed",
        "9",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&dir.join("oppenheim-scan/forms.csv"));
    assert!(rows.iter().all(|r| r[0] == "0"));
    for r in &rows {
        let g: Vec<f64> = r[1..10].iter().map(|x| x.parse().unwrap()).collect();
        let g = Mat3([[g[0], g[1], g[2]], [g[3], g[4], g[5]], [g[6], g[7], g[8]]]);
        let t: f64 = r[10].parse().unwrap();
        assert!(t <= 25.4);
        let lib = min_form_value_direct(&form_from_g(&g).unwrap(), t, NormChoice::Euclidean).unwrap();
        assert_eq!(r[11].parse::<f64>().unwrap(), lib.value.abs());
        let n: Vec<i64> = r[12..15].iter().map(|x| x.parse().unwrap()).collect();
        assert_eq!(n, lib.n.to_vec());
    }
}

#[test]
fn single_radius_loglaw() {
    let dir = scratch("loglaw1");
    let o = run(&[
        "loglaw-cusp",
        "--samples",
        "1",
        "--t-start",
        "50",
        "--t-count",
        "1",
        "--budget",
        "100",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.join("loglaw-cusp/series.csv"));
    assert_eq!(header, ["point_id", "T", "raw", "beta", "ratio"]);
    assert_eq!(rows.len(), 1);
    let beta: f64 = rows[0][3].parse().unwrap();
    let ratio: f64 = rows[0][4].parse().unwrap();
    assert_eq!(ratio, beta / 50f64.ln());
}

#[test]
fn frozen_control_has_flat_measure() {
    let dir = scratch("frozen");
    let cfg = dir.join("frozen.json");
    fs::write(&cfg, r#"{"family": "frozen"}"#).unwrap();
    let o = run(&["measure", "--samples", "20000", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&dir, "measure");
    assert!(s["slope"].as_f64().unwrap().abs() <= 0.05, "{s}");
    assert_eq!(s["family"], "frozen");
}

#[test]
fn met_decay_defaults_report_decay() {
    let dir = scratch("met");
    let o = run(&["met-decay", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&dir, "met-decay");
    assert!(s["kappa"].as_f64().unwrap() > 0.0, "{s}");
    assert!(s["slope"].as_f64().unwrap() < 0.0);
    assert!(s["residual"].as_f64().is_some());
    assert_eq!(s["schema_version"], 1);
}
