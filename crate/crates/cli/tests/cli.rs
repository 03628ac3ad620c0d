use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CUBIC: &str = r#"{
  "n": 1, "n0": 2,
  "p": [[{"alpha": [2, 0], "re": 1}, {"alpha": [0, 2], "re": 1}, {"alpha": [3, 0], "re": 1}]],
  "z0": "bottom", "n_cut": 30, "guard": "auto", "h": [0.02, 0.01, 0.005],
  "scan": {"rect": {"re_min": -0.01, "re_max": 0.05, "im_min": -0.02, "im_max": 0.02}, "nx": 7, "ny": 5}
}"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("problem.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path, workers: Option<usize>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_grushin-lab"));
    c.arg(cmd).arg("--config").arg(config).arg("--out").arg(out);
    if let Some(w) = workers {
        c.arg("--workers").arg(w.to_string());
    }
    c.output().unwrap()
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn harmonic_oscillator_analysis() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}, {"alpha": [0, 2], "re": 1}]],
            "z0": "bottom", "n_cut": 10, "guard": "auto", "h": [0.1]}"#,
    );
    let out = dir.path().join("out");
    let o = run("analyze", &cfg, &out, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["quadratic"]["k0"], 0);
    assert_eq!(r["quadratic"]["elliptic"], true);
    let mu = complex(&r["quadratic"]["spectrum_modes"][0]["mu"]);
    assert!((mu.0 - 1.0).abs() < 1e-12 && mu.1.abs() < 1e-12);
    assert!(r["grushin"].is_null());
    assert!(!r["caveats"].as_array().unwrap().is_empty());
}

#[test]
fn non_elliptic_symbol_exits_with_assumption_code() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [0, 2], "re": 1}]],
            "z0": "bottom", "n_cut": 10, "guard": "auto", "h": [0.1]}"#,
    );
    let o = run("grushin", &cfg, &dir.path().join("out"), None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("full ellipticity"));
}

#[test]
fn invalid_configs_exit_with_config_code() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"n": 1}"#,
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}]], "z0": "top", "n_cut": 5, "guard": "auto", "h": [0.1]}"#,
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0, 1], "re": 1}]], "z0": "bottom", "n_cut": 5, "guard": "auto", "h": [0.1]}"#,
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}]], "z0": "bottom", "n_cut": 5, "guard": "auto", "h": [1.5]}"#,
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}]], "z0": "bottom", "n_cut": 5, "guard": "auto", "h": [0.1], "bogus": 1}"#,
        "not json",
    ];
    for (i, text) in cases.iter().enumerate() {
        let sub = dir.path().join(format!("case{i}"));
        std::fs::create_dir_all(&sub).unwrap();
        let cfg = write_config(&sub, text);
        let o = run("grushin", &cfg, &sub.join("out"), None);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn off_lattice_z0_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"n": 1, "n0": 1, "p": [[{"alpha": [2, 0], "re": 1}, {"alpha": [0, 2], "re": 1}]],
            "z0": {"re": 2.0}, "n_cut": 10, "guard": "auto", "h": [0.1]}"#,
    );
    let o = run("grushin", &cfg, &dir.path().join("out"), None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cubic_second_order_coefficient() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CUBIC);
    let out = dir.path().join("out");
    let o = run("validate", &cfg, &out, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["grushin"]["d"], 1);
    let z1 = complex(&r["expansion"]["ztilde"][0]);
    let z2 = complex(&r["expansion"]["ztilde"][1]);
    assert!(z1.0.abs() < 1e-10 && z1.1.abs() < 1e-10);
    assert!((z2.0 + 11.0 / 16.0).abs() < 1e-9 && z2.1.abs() < 1e-9);
    assert_eq!(r["validation"]["pass"], true);
    assert_eq!(r["grushin"]["margin"]["satisfied"], true);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CUBIC);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run("grushin", &cfg, &a, None).status.code(), Some(0));
    assert_eq!(run("grushin", &cfg, &b, None).status.code(), Some(0));
    assert_eq!(
        std::fs::read(a.join("report.json")).unwrap(),
        std::fs::read(b.join("report.json")).unwrap()
    );
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CUBIC);
    let one = dir.path().join("one");
    let three = dir.path().join("three");
    assert_eq!(run("pseudospectrum", &cfg, &one, Some(1)).status.code(), Some(0));
    assert_eq!(run("pseudospectrum", &cfg, &three, Some(3)).status.code(), Some(0));
    for name in ["report.json", "grid_0.02.csv", "grid_0.01.csv", "grid_0.005.csv"] {
        assert_eq!(
            std::fs::read(one.join(name)).unwrap(),
            std::fs::read(three.join(name)).unwrap(),
            "{name}"
        );
    }
    let csv = std::fs::read_to_string(one.join("grid_0.01.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7 * 5);
    let r = report(&one);
    assert_eq!(r["pseudospectrum"].as_array().unwrap().len(), 3);
}

#[test]
fn zero_workers_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CUBIC);
    let o = run("pseudospectrum", &cfg, &dir.path().join("out"), Some(0));
    assert_eq!(o.status.code(), Some(2));
}
