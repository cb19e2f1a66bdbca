use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pachner33")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_random_seed_passes() {
    let o = bin(&["verify-pachner", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    let (re, im) = complex(&r["const"]);
    assert!(re.hypot(im) > 1e-10);
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(r["loop_residuals"].as_array().unwrap().len(), 10);
    assert_eq!(r["gauges"].as_object().unwrap().len(), 15);
    assert_eq!(r["seed"], json!(1));
}

#[test]
fn verify_elliptic_passes_and_reports_params() {
    let o = bin(&["verify-pachner", "--elliptic", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["source"]["kind"], "elliptic");
    assert_eq!(r["source"]["params"]["coords"].as_object().unwrap().len(), 6);
}

#[test]
fn verify_explicit_elliptic_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let coords = json!({"1": [0.35, 0.1], "2": [0.7, -0.2], "3": [1.05, 0.25], "4": [1.4, -0.05], "5": [1.75, 0.2], "6": [2.1, -0.25]});
    let path = write(dir.path(), "coords.json", &coords);
    let o = bin(&["verify-pachner", "--modulus", "0.5,0.2", "--coords", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["source"]["params"]["modulus"], json!([0.5, 0.2]));
    // coordinates without a modulus are rejected
    assert_eq!(bin(&["verify-pachner", "--coords", &path]).status.code(), Some(2));
}

#[test]
fn all_ones_cocycle_fails_with_lambda_minus() {
    let dir = tempfile::tempdir().unwrap();
    let mut values = serde_json::Map::new();
    for i in 1..=6 {
        for j in i + 1..=6 {
            for k in j + 1..=6 {
                values.insert(format!("{i},{j},{k}"), json!([1.0, 0.0]));
            }
        }
    }
    let path = write(dir.path(), "ones.json", &json!({"degree": 2, "values": values}));
    let o = bin(&["verify-pachner", "--cocycle", &path]);
    assert_ne!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["error"]["kind"], "KappaDegenerate");
    assert!(r["error"]["message"].as_str().unwrap().contains("λ₋ = 0"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("λ₋ = 0"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = bin(&["verify-pachner", "--seed", "9", "--elliptic", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    // every float carries 17 significant digits
    assert!(text.contains("e-"));
    let v: Value = serde_json::from_str(&text).unwrap();
    let re = v["const"][0].to_string();
    assert!(!re.is_empty());
    assert!(text.contains(&format!("{:.16e}", v["const"][0].as_f64().unwrap())));
}

#[test]
fn batch_matches_single_runs() {
    let o = bin(&["verify-pachner", "--seed", "3", "--batch", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let runs = stdout_json(&o)["runs"].as_array().unwrap().clone();
    assert_eq!(runs.len(), 3);
    for (i, run) in runs.iter().enumerate() {
        let single = stdout_json(&bin(&["verify-pachner", "--seed", &(3 + i).to_string()]));
        assert_eq!(run, &single);
    }
}

#[test]
fn tight_tolerance_fails_verification() {
    let o = bin(&["verify-pachner", "--seed", "1", "--tolerance", "1e-18"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["passed"], json!(false));
}

#[test]
fn weight_cocycle_conversions_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let f_path = dir.path().join("f.json");
    let o = bin(&["edge-operators", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let fam = stdout_json(&o);
    assert_eq!(fam["normalized"], json!(true));
    assert_eq!(fam["edges"].as_object().unwrap().len(), 10);
    assert_eq!(fam["edges"]["1,2"]["terms"].as_object().unwrap().len(), 5);

    // an F file: from an elliptic weight, then ω, then F back
    let o = bin(&["elliptic-f", "--seed", "4", "--out", f_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = bin(&["cocycle-from-weight", f_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let omega = stdout_json(&o);
    assert_eq!(omega["degree"], json!(2));
    assert_eq!(omega["values"].as_object().unwrap().len(), 10);
    let w_path = write(dir.path(), "w.json", &omega);
    let o = bin(&["weight-from-cocycle", "--cocycle", &w_path]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let g = stdout_json(&o);
    assert!(g["diagnostics"]["roundtrip_residual"].as_f64().unwrap() <= 1e-8);
    assert!(g["diagnostics"]["cocycle_residual"].as_f64().unwrap() <= 1e-12);
    let g_path = write(dir.path(), "g.json", &g);
    let o = bin(&["edge-operators", &g_path]);
    assert_eq!(o.status.code(), Some(0));
    let back = stdout_json(&bin(&["cocycle-from-weight", &g_path]));
    for (k, v) in omega["values"].as_object().unwrap() {
        let (a, b) = (complex(v), complex(&back["values"][k]));
        assert!((a.0 - b.0).hypot(a.1 - b.1) <= 1e-8, "{k}");
    }
}

#[test]
fn bad_inputs_exit_with_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", &json!({"degree": 2, "values": {"1,2,3": [1.0]}}));
    let o = bin(&["weight-from-cocycle", "--cocycle", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[re, im]"));
    assert_ne!(bin(&["cocycle-from-weight", "/nonexistent.json"]).status.code(), Some(0));
    assert_ne!(bin(&["verify-pachner", "--modulus", "oops"]).status.code(), Some(0));
}

#[test]
fn selftest_passes_and_too_tight_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("self.json");
    let o = bin(&["selftest", "--seed", "1", "--out", out.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("criterion") && l.contains("PASS")).count(), 10);
    let summary: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(summary["criteria"].as_array().unwrap().len(), 10);

    let o = bin(&["selftest", "--tolerance", "1e-15"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
