//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wavespec::io::{read_doppler, read_grid, read_json, read_rows, Manifest, NoiseRow, SweepRow};
use wavespec::core::sea::significant_wave_height;
use wavespec::core::RadarParams;

const SMALL: [&str; 6] = ["--set", "grid.n=16", "--set", "frequency.samples=65", "--set", "experiments.seeds=[0,1]"];

fn wavespec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavespec")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = wavespec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_deterministic_finite_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&["simulate", "--out-dir", path(&a)]);
    ok(&["simulate", "--out-dir", path(&b)]);
    for name in ["truth.json", "doppler.csv", "manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs between runs");
    }
    let params = RadarParams::new(0.51).unwrap();
    let sigma2 = read_doppler(&a.join("doppler.csv"), &params).unwrap();
    assert_eq!(sigma2.values().len(), 257);
    assert!(sigma2.values().iter().all(|v| v.is_finite()));
    let truth = read_grid(&a.join("truth.json")).unwrap();
    let hs = significant_wave_height(&truth).unwrap();
    assert!((hs - 1.0).abs() < 0.05, "H_s = {hs}");
    let manifest: Manifest = read_json(&a.join("manifest.json")).unwrap();
    assert_eq!(manifest.command, "simulate");
    assert_eq!(manifest.config_sha256.len(), 64);
    assert_eq!(manifest.outputs, ["truth.json", "doppler.csv"]);
    assert_eq!(manifest.version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn reconstruct_from_truth_keeps_wave_height() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let rec = dir.path().join("rec");
    ok(&["simulate", "--out-dir", path(&sim)]);
    let truth = sim.join("truth.json");
    ok(&[
        "reconstruct",
        "--doppler",
        path(&sim.join("doppler.csv")),
        "--init",
        path(&truth),
        "--truth",
        path(&truth),
        "--out-dir",
        path(&rec),
    ]);
    let summary: serde_json::Value = read_json(&rec.join("summary.json")).unwrap();
    assert_eq!(summary["err_init_pct"], 0.0);
    // Starting at the minimizer of the data term, each step with t = 1 scales S
    // by about (1 − 2λ), so H_s = 4√∫S drifts by about 1 − (1 − 2λ)^(n/2).
    let bound = 100.0 * (1.0 - (1.0 - 2e-3_f64).powi(10));
    let drift = summary["hs_err_final_pct"].as_f64().unwrap();
    assert!(drift < 1.05 * bound, "drift {drift}% vs bound {bound}%");
    let trace = fs::read_to_string(rec.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,theta_total,theta_misfit,theta_tikhonov,theta_sparsity,step_t,backtracks,rel_err_pct,hs_m"
    );
    assert_eq!(lines.count(), 21);
    let spectrum = read_grid(&rec.join("spectrum.json")).unwrap();
    assert!(spectrum.is_nonnegative());
}

#[test]
fn reconstruct_without_truth_leaves_error_columns_empty() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let rec = dir.path().join("rec");
    ok(&["simulate", "--out-dir", path(&sim), "--set", "grid.n=16"]);
    ok(&["reconstruct", "--doppler", path(&sim.join("doppler.csv")), "--out-dir", path(&rec), "--set", "grid.n=16"]);
    let trace = fs::read_to_string(rec.join("trace.csv")).unwrap();
    let first = trace.lines().nth(1).unwrap();
    assert_eq!(first.split(',').nth(7), Some(""));
    let summary: serde_json::Value = read_json(&rec.join("summary.json")).unwrap();
    assert!(summary["err_final_pct"].is_null());
}

#[test]
fn missing_input_fails_without_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("rec");
    let out = wavespec(&["reconstruct", "--doppler", path(&dir.path().join("nope.csv")), "--out-dir", path(&rec)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!rec.exists());
}

#[test]
fn infeasible_init_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--out-dir", path(&sim), "--set", "grid.n=16"]);
    let mut grid: serde_json::Value = read_json(&sim.join("truth.json")).unwrap();
    grid["values"][5] = serde_json::json!(-1.0);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, grid.to_string()).unwrap();
    let rec = dir.path().join("rec");
    let out = wavespec(&[
        "reconstruct",
        "--doppler",
        path(&sim.join("doppler.csv")),
        "--init",
        path(&bad),
        "--out-dir",
        path(&rec),
        "--set",
        "grid.n=16",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative"));
    assert!(!rec.exists());
}

#[test]
fn config_printing_overrides_and_rejection() {
    let text = ok(&["print-config", "--set", "solver.lambda=0.5"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["solver"]["lambda"], 0.5);
    assert_eq!(value["grid"]["n"], 64);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"grid": {"n": 20}}"#).unwrap();
    let text = ok(&["print-config", "--config", path(&cfg)]);
    assert!(text.contains("\"n\": 20"));

    fs::write(&cfg, r#"{"grid": {"size": 20}}"#).unwrap();
    assert_eq!(wavespec(&["print-config", "--config", path(&cfg)]).status.code(), Some(1));
    assert_eq!(wavespec(&["print-config", "--set", "grid.size=3"]).status.code(), Some(1));
}

#[test]
fn sweep_and_noise_table_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let mut args = vec!["sweep", "--out", path(&sweep)];
    args.extend(SMALL);
    ok(&args);
    let rows: Vec<SweepRow> = read_rows(&sweep).unwrap();
    assert_eq!(rows.len(), 10 * 2);
    assert_eq!(rows[0].level_pct, 5.0);
    assert_eq!(rows.last().unwrap().level_pct, 50.0);
    assert!(rows.iter().all(|r| r.iters == 20 && r.err_final_pct.is_some()));
    assert!(sweep.with_file_name("sweep.csv.manifest.json").exists());

    let noise = dir.path().join("noise.csv");
    let mut args = vec!["noise-table", "--out", path(&noise)];
    args.extend(SMALL);
    ok(&args);
    let rows: Vec<NoiseRow> = read_rows(&noise).unwrap();
    assert_eq!(rows.iter().map(|r| r.noise_pct).collect::<Vec<_>>(), [0.5, 1.0, 5.0]);
    assert!(rows.iter().all(|r| r.iters == 10));
}

#[test]
fn perturb_reports_exact_level() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--out-dir", path(&sim), "--set", "grid.n=16"]);
    let init = dir.path().join("init.json");
    let line = ok(&[
        "perturb",
        "--kind",
        "spectrum-init",
        "--input",
        path(&sim.join("truth.json")),
        "--level",
        "40",
        "--seed",
        "3",
        "--out",
        path(&init),
        "--set",
        "grid.n=16",
    ]);
    assert!(line.contains("pre-clamp 40.000000%"), "{line}");
    let manifest: Manifest = read_json(&init.with_file_name("init.json.manifest.json")).unwrap();
    assert!((manifest.metrics["pre_clamp_pct"] - 40.0).abs() < 1e-9);

    let noisy = dir.path().join("noisy.csv");
    ok(&[
        "perturb",
        "--kind",
        "doppler-noise",
        "--input",
        path(&sim.join("doppler.csv")),
        "--level",
        "5",
        "--out",
        path(&noisy),
        "--set",
        "grid.n=16",
    ]);
    let params = RadarParams::new(0.51).unwrap();
    let clean = read_doppler(&sim.join("doppler.csv"), &params).unwrap();
    let perturbed = read_doppler(&noisy, &params).unwrap();
    assert!((perturbed.rel_distance(&clean).unwrap() * 100.0 - 5.0).abs() < 1e-9);
}

#[test]
fn suggest_lambda_vanishes_at_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--out-dir", path(&sim), "--set", "grid.n=16"]);
    let text = ok(&["suggest-lambda", "--doppler", path(&sim.join("doppler.csv")), "--set", "grid.n=16"]);
    assert_eq!(text.trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn validate_quick_passes_and_flags_corrupt_gradient() {
    let out = ok(&["validate", "--quick"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
    assert!(out.contains("gradient: measured"));
    let bad = wavespec(&["validate", "--quick", "--corrupt-gradient"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL gradient"));
}

#[test]
fn zero_threads_rejected() {
    assert_eq!(wavespec(&["print-config", "--threads", "0"]).status.code(), Some(1));
    ok(&["print-config", "--threads", "1"]);
}
