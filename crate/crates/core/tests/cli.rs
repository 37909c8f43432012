// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const DIM_32: f64 = 1.349_683_820_195_577_6;
const VALUE_32: f64 = 0.935_529_534_615_940_8;
const LOG_GOLDEN: f64 = 0.481_211_825_059_603_4;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn wentro(args: &[&str], input: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wentro"))
        .args(args)
        .arg("--input")
        .arg(input)
        .env_remove("WENTRO_CAP")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn carpet(dir: &TempDir) -> PathBuf {
    write(dir, "carpet.json", r#"{"a": 3, "b": 2, "R": [[0,0],[1,1],[2,0]]}"#)
}

fn golden(dir: &TempDir) -> PathBuf {
    write(dir, "golden.json", r#"{"alphabet_size": 2, "transitions": [[1,1],[1,0]], "code": [0,0]}"#)
}

#[test]
fn dim_carpet_values() {
    let dir = TempDir::new().unwrap();
    let r = json(&wentro(&["dim-carpet"], &carpet(&dir)));
    assert!((r["dimension_dim"].as_f64().unwrap() - DIM_32).abs() < 1e-9);
    assert!((r["entropy"].as_f64().unwrap() - VALUE_32).abs() < 1e-9);

    let full = write(&dir, "full.json", r#"{"a": 3, "b": 2, "R": [[0,0],[0,1],[1,0],[1,1],[2,0],[2,1]]}"#);
    let r = json(&wentro(&["dim-carpet"], &full));
    assert_eq!(r["dimension_dim"].as_f64().unwrap(), 2.0);
    assert_eq!(r["exact"], Value::Bool(true));
    let point = write(&dir, "point.json", r#"{"a": 4, "b": 3, "R": [[1,2]]}"#);
    assert_eq!(json(&wentro(&["dim-carpet"], &point))["dimension_dim"].as_f64().unwrap(), 0.0);

    let sofic = write(
        &dir,
        "sofic.json",
        r#"{"a": 3, "b": 2, "R": [[0,0],[1,1],[2,0]], "digit_transitions": [[1,1,0],[1,1,1],[1,1,1]]}"#,
    );
    let r = json(&wentro(&["dim-carpet", "--nmax", "10"], &sofic));
    let iv = r["interval_dim"].as_array().unwrap();
    let (lo, hi) = (iv[0].as_f64().unwrap(), iv[1].as_f64().unwrap());
    assert!(lo <= hi && hi < DIM_32);
    assert_eq!(r["lower_kind"], "certified");
}

#[test]
fn entropy_reports() {
    let dir = TempDir::new().unwrap();
    let r = json(&wentro(&["entropy", "--nmax", "3"], &carpet(&dir)));
    assert!((r["upper"].as_f64().unwrap() - VALUE_32).abs() < 1e-9);
    assert!((r["lower"].as_f64().unwrap() - VALUE_32).abs() < 1e-9);
    assert_eq!(r["records"].as_array().unwrap().len(), 3);
    for key in ["w", "N", "logZ", "upper", "lower", "lower_kind"] {
        assert!(r["records"][0].get(key).is_some(), "{key}");
    }

    let r = json(&wentro(&["entropy", "--w", "1", "--nmax", "12"], &golden(&dir)));
    let (lo, hi) = (r["lower"].as_f64().unwrap(), r["upper"].as_f64().unwrap());
    assert!(lo <= LOG_GOLDEN + 1e-12 && LOG_GOLDEN <= hi + 1e-12 && hi - lo < 1e-9);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"alphabet_size": 2, "transitions": [[1,1],[1]], "code": [0,0]}"#);
    let out = wentro(&["entropy", "--w", "1"], &bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("transitions[1]"));

    let corrupt = write(&dir, "corrupt.json", r#"{"alphabet_size": [2, 2], "transitions": [[1,1],[1,0]], "code": [0,7]}"#);
    let out = wentro(&["verify-vp", "--w", "0.5"], &corrupt);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("code[1]"));

    assert_eq!(wentro(&["entropy"], &golden(&dir)).status.code(), Some(2));
    assert_eq!(wentro(&["entropy", "--w", "1.5"], &golden(&dir)).status.code(), Some(2));
    assert_eq!(wentro(&["entropy", "--w", "1"], &dir.path().join("missing.json")).status.code(), Some(2));
    assert_eq!(wentro(&["report"], &carpet(&dir)).status.code(), Some(2));

    let full3 = write(&dir, "full3.json", r#"{"alphabet_size": 3, "transitions": [[1,1,1],[1,1,1],[1,1,1]], "code": [0,1,2]}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_wentro"))
        .args(["entropy", "--w", "0.5", "--nmax", "8", "--input"])
        .arg(&full3)
        .env("WENTRO_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn report_csv() {
    let dir = TempDir::new().unwrap();
    let out = wentro(&["report", "--grid", "0,0.5,1", "--nmax", "4"], &carpet(&dir));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w,lower,upper,opt_value_lo,opt_value_hi,gap"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r[5].abs() <= 1e-6, "{r:?}");
    }
    assert!((rows[0][2] - 2f64.ln()).abs() < 1e-11);
    assert!((rows[0][3] - 2f64.ln()).abs() < 1e-11);
}

#[test]
fn verify_vp_passes_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let r = json(&wentro(&["verify-vp", "--nmax", "6"], &carpet(&dir)));
    assert_eq!(r["passed"], Value::Bool(true));
    let gap = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "variational_gap").unwrap();
    assert!(gap["value"].as_f64().unwrap() <= 1e-4);
    for key in ["value_lower", "value_upper", "measure", "residuals", "config", "seed"] {
        assert!(r.get(key).is_some(), "{key}");
    }

    let random = Path::new("random");
    let run = || {
        let mut v = json(&wentro(&["verify-vp", "--count", "3", "--seed", "9", "--nmax", "6"], random));
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = run();
    assert_eq!(a["passed"], Value::Bool(true));
    assert_eq!(a["instances"].as_array().unwrap().len(), 3);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&run()).unwrap());
}

#[test]
fn potential_and_measure_files() {
    let dir = TempDir::new().unwrap();
    let pot = write(&dir, "f.json", r#"{"window": 1, "0": 0.5, "1": -0.25}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_wentro"))
        .args(["entropy", "--w", "1", "--nmax", "10", "--input"])
        .arg(golden(&dir))
        .arg("--potential")
        .arg(&pot)
        .output()
        .unwrap();
    let r = json(&out);
    // pressure of the golden mean with f = (a, b): log of the top root of t^2 = e^a t + e^{a+b}
    let (a, b) = (0.5f64, -0.25f64);
    let ea = a.exp();
    let p = ((ea + (ea * ea + 4.0 * (a + b).exp()).sqrt()) / 2.0).ln();
    assert!(r["lower"].as_f64().unwrap() <= p + 1e-9 && p <= r["upper"].as_f64().unwrap() + 1e-9);

    let m = write(&dir, "m.json", r#"{"pi": [0.6, 0.4], "P": [[0.3333333333333333, 0.6666666666666667], [1.0, 0.0]]}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_wentro"))
        .args(["verify-vp", "--w", "0.5", "--nmax", "6", "--input"])
        .arg(golden(&dir))
        .arg("--measure")
        .arg(&m)
        .output()
        .unwrap();
    let r = json(&out);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "measure_inequality"));
}
