use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-gbs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_stdout(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_at_half() {
    let v = json_stdout(&run(&["generate", "--p", "0.5", "--format", "json"]));
    let infidelity = 1.0 - v["fidelity_to_target"].as_f64().unwrap();
    assert!((infidelity - 1.6e-9).abs() < 0.3e-9, "{infidelity}");
    assert_eq!(v["target"]["n"], 2);
}

#[test]
fn generate_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = run(&["--out", out, "generate", "--p", "0.2"]);
    assert_eq!(code(&r), 0);
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "generate");
    assert_eq!(m["config_digest"].as_str().unwrap().len(), 64);
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    for name in m["outputs"].as_array().unwrap() {
        assert!(dir.path().join(name.as_str().unwrap()).is_file());
    }
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(names.iter().all(|n| !n.to_string_lossy().ends_with(".tmp")));

    // Same inputs give the same digest; different inputs do not.
    let again = TempDir::new().unwrap();
    run(&["--out", again.path().to_str().unwrap(), "generate", "--p", "0.2"]);
    let other = TempDir::new().unwrap();
    run(&["--out", other.path().to_str().unwrap(), "generate", "--p", "0.3"]);
    let digest = |d: &TempDir| read_json(&d.path().join("manifest.json"))["config_digest"].clone();
    assert_eq!(digest(&dir), digest(&again));
    assert_ne!(digest(&dir), digest(&other));
}

#[test]
fn config_file_is_used() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"generation": {"p": 1.0, "phi1": 0.4}}"#).unwrap();
    let v = json_stdout(&run(&["--config", cfg.to_str().unwrap(), "generate", "--format", "json"]));
    assert_eq!(v["target"]["p"], 1.0);
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"generation": {"p": "half"}}"#).unwrap();
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "generate"])), 2);
    fs::write(&cfg, r#"{"generation": {"probability": 0.5}}"#).unwrap();
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "generate"])), 2);
    assert_eq!(code(&run(&["--config", "/does/not/exist.json", "generate"])), 2);
    assert_eq!(code(&run(&["generate", "--p", "1.5"])), 2);
}

#[test]
fn truncation_leak_exits_3() {
    let r = run(&["generate", "--n-max", "1"]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("leak"));
}

#[test]
fn measure_separates_orthogonal_pair() {
    let p = 0.3;
    let phi = 0.8;
    let target = format!("2,{p},{phi}");
    let ortho = format!("2,{},{}", 1.0 - p, std::f64::consts::PI + phi);
    let args = |state: &str| {
        run(&["measure", "--state", state, "--p", &p.to_string(), "--phi", &phi.to_string(), "--format", "json"])
    };
    let a = json_stdout(&args(&target));
    assert!(a["measurement"]["prob_up"].as_f64().unwrap() >= 0.999);
    let b = json_stdout(&args(&ortho));
    assert!(b["measurement"]["prob_down"].as_f64().unwrap() >= 0.999);
    assert_eq!(b["discrimination"]["label"], "2GBS(1−p,π+φ)");
}

#[test]
fn measure_reads_and_pads_state_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("state.json");
    // |2,p=1⟩ = |2⟩ at n_max = 2.
    fs::write(&path, r#"{"n_max": 2, "amps": [[0,0],[0,0],[1,0]], "basis": "field"}"#).unwrap();
    let v = json_stdout(&run(&["measure", "--state-file", path.to_str().unwrap(), "--p", "1", "--format", "json"]));
    assert!(v["measurement"]["prob_up"].as_f64().unwrap() >= 0.999);
}

#[test]
fn measure_input_errors() {
    assert_eq!(code(&run(&["measure", "--state-file", "/no/such/state.json", "--p", "0.5"])), 2);
    assert_eq!(code(&run(&["measure", "--state", "2,0.5", "--p", "0.5"])), 2);
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("state.json");
    fs::write(&path, r#"{"n_max": 2, "amps": [[1,0],[1,0],[0,0]], "basis": "field"}"#).unwrap();
    assert_eq!(code(&run(&["measure", "--state-file", path.to_str().unwrap(), "--p", "0.5"])), 2);
}

#[test]
fn optimize_timing_picks_m2_5() {
    let dir = TempDir::new().unwrap();
    let v = json_stdout(&run(&["--out", dir.path().to_str().unwrap(), "optimize-timing", "--format", "json"]));
    assert_eq!(v["best"]["m2"], 5);
    assert_eq!(v["table"].as_array().unwrap().len(), 17);
    let csv = fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "m2,gT2,sin,delta");
    assert_eq!(csv.lines().count(), 18);

    let windowed = json_stdout(&run(&["optimize-timing", "--gt-min", "0.1", "--gt-max", "100", "--format", "json"]));
    assert_eq!(windowed["best"]["m2"], 5);
}

#[test]
fn optimize_timing_empty_range_exits_2() {
    assert_eq!(code(&run(&["optimize-timing", "--gt-min", "1", "--gt-max", "2"])), 2);
    assert_eq!(code(&run(&["optimize-timing", "--gt-min", "50", "--gt-max", "10"])), 2);
}

#[test]
fn error_sweep_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = |d: &TempDir| {
        run(&[
            "--out",
            d.path().to_str().unwrap(),
            "--seed",
            "7",
            "error-sweep",
            "--jitters",
            "0,0.01",
            "--samples",
            "200",
            "--write-samples",
        ])
    };
    assert_eq!(code(&args(&a)), 0);
    assert_eq!(code(&args(&b)), 0);
    for name in ["error_sweep.csv", "samples_0.csv", "samples_1.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let samples = fs::read_to_string(a.path().join("samples_1.csv")).unwrap();
    assert_eq!(samples.lines().next().unwrap(), "sample,eps_t1,eps_t2,fidelity,p2,detected");
    assert_eq!(samples.lines().count(), 201);
    assert_eq!(read_json(&a.path().join("manifest.json"))["seed"], 7);
}

#[test]
fn error_sweep_values() {
    let v = json_stdout(&run(&["error-sweep", "--jitters", "0,0.01", "--samples", "500", "--format", "json"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["std_infidelity"], 0.0);
    assert_eq!(rows[0]["delta_exp"], 0.0);
    let d = rows[1]["delta_exp"].as_f64().unwrap();
    assert!((d - 0.207).abs() < 1e-3, "{d}");
    assert!(rows[1]["mean_infidelity"].as_f64().unwrap() > 10.0 * 9.17e-5);
}

#[test]
fn error_sweep_needs_enough_samples() {
    assert_eq!(code(&run(&["error-sweep", "--samples", "99"])), 2);
}

#[test]
fn verify_basis_exit_codes() {
    assert_eq!(code(&run(&["verify-basis", "--p", "0.5", "--phi", "0"])), 0);
    assert_eq!(code(&run(&["verify-basis", "--p", "0.3", "--phi", "1.7"])), 0);
    assert_eq!(code(&run(&["verify-basis", "--p", "0.3", "--phi", "1.7", "--perturb", "1e-6"])), 4);
    assert_eq!(code(&run(&["verify-basis", "--p", "2", "--phi", "0"])), 2);
}

#[test]
fn j3_spectrum_json() {
    let v = json_stdout(&run(&["j3-spectrum", "--p", "0.3", "--phi", "-2.3", "--format", "json"]));
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["eigenvalues", "p", "phi", "residuals"]);
    let ev: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (e, t) in ev.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((e - t).abs() < 1e-12);
    }
}

#[test]
fn csv_format_unavailable_is_input_error() {
    assert_eq!(code(&run(&["j3-spectrum", "--p", "0.5", "--format", "csv"])), 2);
}

#[test]
fn feasibility_checks() {
    // g = 2π·50 kHz, microwave cavity lifetimes.
    let ok = run(&["--units", "si", "--g", "3.14159e5", "feasibility", "--tau-at", "3e-2", "--tau-cav", "1e-3"]);
    assert_eq!(code(&ok), 0);
    let short = run(&["feasibility", "--tau-at", "3e-2", "--tau-cav", "1e-5", "--times", "5e-6,1e-4"]);
    assert_eq!(code(&short), 4);
    let seq = run(&[
        "feasibility", "--tau-at", "1e-3", "--tau-cav", "1e-3", "--times", "1e-4", "--sequence-duration", "2e-3",
    ]);
    assert_eq!(code(&seq), 4);
    assert_eq!(code(&run(&["feasibility", "--tau-at", "1", "--tau-cav", "1"])), 2);
}

#[test]
fn si_units_scale_times() {
    let v = json_stdout(&run(&["--units", "si", "--g", "2", "generate", "--format", "json"]));
    let t2 = v["t2"].as_f64().unwrap();
    assert!((t2 - 41.0 * std::f64::consts::PI / 8.0).abs() < 1e-12);
    assert_eq!(code(&run(&["--g", "2", "generate"])), 2);
}
