use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    json: Value,
    stdout: String,
}

fn sympwig(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_sympwig"))
        .args(args)
        .current_dir(dir)
        .env("SYMPWIG_THREADS", "2")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap_or(-1), json, stdout }
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn fixture(dir: &Path, name: &str, args: &[&str]) -> String {
    let mut full = vec!["fixture"];
    full.extend_from_slice(args);
    let r = sympwig(dir, &full);
    assert_eq!(r.code, 0, "{}", r.stdout);
    write(dir, name, &r.stdout);
    name.to_string()
}

fn f64_of(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn two_scale_spectrum_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "a.json", &["diagonal-cov", "--a", "2", "--b", "3"]);
    fixture(d, "om.json", &["two-scale-form", "--theta", "2"]);
    let r = sympwig(d, &["spectrum", "--cov", "a.json", "--form", "om.json"]);
    assert_eq!(r.code, 0);
    let s: Vec<f64> = r.json["spectrum"].as_array().unwrap().iter().map(f64_of).collect();
    let root6 = 6f64.sqrt();
    assert!((s[0] - root6 / 2.0).abs() <= 1e-10);
    assert!((s[1] - 2.0 * root6).abs() <= 1e-10);
    assert_eq!(r.json["wigner"], Value::Bool(true));
}

#[test]
fn vacuum_is_on_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "v.json", &["vacuum", "--n", "1"]);
    let r = sympwig(d, &["spectrum", "--cov", "v.json", "--form", "J"]);
    assert_eq!(r.code, 0);
    assert!((f64_of(&r.json["lambda1"]) - 0.5).abs() <= 1e-14);
    assert_eq!(r.json["wigner"], Value::Bool(true));
}

#[test]
fn malformed_json_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", "{\"n\": 2, ");
    let r = sympwig(d, &["spectrum", "--cov", "bad.json"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"], "MalformedJson");
    assert!(r.json["detail"].is_string());
}

#[test]
fn structural_validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ord = "x1..xn,p1..pn";
    write(d, "notspd.json", &format!(r#"{{"n":1,"ordering":"{ord}","kind":"covariance","matrix":[[1,0],[0,-1]]}}"#));
    write(d, "badorder.json", r#"{"n":1,"ordering":"x1,p1,x2,p2","kind":"covariance","matrix":[[1,0],[0,1]]}"#);
    write(d, "wrongkind.json", &format!(r#"{{"n":1,"ordering":"{ord}","kind":"form","matrix":[[1,0],[0,1]]}}"#));
    write(d, "shape.json", &format!(r#"{{"n":2,"ordering":"{ord}","kind":"covariance","matrix":[[1,0],[0,1]]}}"#));
    for (file, tag) in [
        ("notspd.json", "NotPositiveDefinite"),
        ("badorder.json", "BadOrdering"),
        ("wrongkind.json", "WrongKind"),
        ("shape.json", "DimensionMismatch"),
        ("missing.json", "Io"),
    ] {
        let r = sympwig(d, &["spectrum", "--cov", file]);
        assert_eq!(r.code, 2, "{file}");
        assert_eq!(r.json["error"], tag, "{file}");
    }
    let r = sympwig(d, &["spectrum"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json["error"], "Usage");
}

#[test]
fn generated_gaussian_regions_round_trip_through_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "om.json", &["two-scale-form"]);
    for region in ["A3", "A5", "A6", "A7"] {
        let r = sympwig(d, &["generate", "--region", region, "--form1", "J", "--form2", "om.json", "--seed", "7", "--out", "s.json"]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        let c = sympwig(d, &["classify", "--state", "s.json", "--form1", "J", "--form2", "om.json"]);
        assert_eq!(c.code, 0);
        assert_eq!(c.json["label"], region);
    }
}

#[test]
fn generated_nongaussian_regions_round_trip_through_classify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "om.json", &["two-scale-form"]);
    for region in ["A1", "A2", "A4"] {
        let r = sympwig(d, &["generate", "--region", region, "--form1", "J", "--form2", "om.json", "--out", "s.json"]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        let c = sympwig(d, &["classify", "--state", "s.json", "--form1", "J", "--form2", "om.json"]);
        assert_eq!(c.code, 0);
        assert_eq!(c.json["label"], region, "{}", c.stdout);
        assert_eq!(c.json["nonnegative"], Value::Bool(false));
    }
}

#[test]
fn generation_is_deterministic_and_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "om.json", &["two-scale-form", "--theta", "3"]);
    let args = ["generate", "--region", "A6", "--form1", "J", "--form2", "om.json", "--seed", "11"];
    let a = sympwig(d, &args);
    let b = sympwig(d, &args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn ppt_detects_squeezed_entanglement() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "sq.json", &["squeezed", "--r", "0.5"]);
    fixture(d, "vac.json", &["squeezed", "--r", "0"]);
    let r = sympwig(d, &["ppt", "--cov", "sq.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json["separable_necessary"], Value::Bool(false));
    assert!((f64_of(&r.json["lambda1_ppt"]) - 0.5 * (-1.0f64).exp()).abs() <= 1e-12);
    let r = sympwig(d, &["ppt", "--cov", "vac.json"]);
    assert_eq!(r.json["separable_necessary"], Value::Bool(true));
}

#[test]
fn fock_one_grid_has_minimum_minus_one_over_pi() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = sympwig(d, &["fock", "--m", "1", "--out", "f1.json"]);
    assert_eq!(r.code, 0);
    let g = sympwig(d, &["grid", "--function", "f1.json", "--out", "grid.csv", "--per-axis", "41"]);
    assert_eq!(g.code, 0, "{}", g.stdout);
    let csv = std::fs::read_to_string(d.join("grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("axis1,axis2,value"));
    let values: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 41 * 41);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((min + std::f64::consts::FRAC_1_PI).abs() <= 1e-12, "min = {min}");
    assert!((f64_of(&g.json["min"]) + std::f64::consts::FRAC_1_PI).abs() <= 1e-12);
}

#[test]
fn klm_refutes_a_wide_gaussian_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "v.json", &["vacuum", "--n", "1"]);
    let inside = sympwig(d, &["klm", "--function", "v.json", "--alpha", "0.9", "--points", "64"]);
    assert_eq!(inside.json["verdict"], Value::Bool(true));
    let outside = sympwig(d, &["klm", "--function", "v.json", "--alpha", "1.05", "--escalate", "--points", "512"]);
    assert_eq!(outside.code, 0);
    assert_eq!(outside.json["verdict"], Value::Bool(false));
}

#[test]
fn convolution_and_overlap_of_vacua() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "v.json", &["vacuum", "--n", "1"]);
    let c = sympwig(d, &["convolve", "--f", "v.json", "--g", "v.json", "--out", "c.json"]);
    assert_eq!(c.code, 0);
    let shape = &c.json["function"]["terms"][0]["shape"];
    assert!((f64_of(&shape[0][0]) - 1.0).abs() <= 1e-14);
    let o = sympwig(d, &["overlap", "--f", "v.json", "--g", "v.json"]);
    // ∫ W² = 1/(2π) for a pure state at ħ = 1
    assert!((f64_of(&o.json["overlap"]) - 0.5 / std::f64::consts::PI).abs() <= 1e-14);
}

#[test]
fn partial_transpose_map_is_neither_symplectic_nor_antisymplectic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "p.json",
        r#"{"n":2,"ordering":"x1..xn,p1..pn","kind":"map","matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]}"#,
    );
    let v = sympwig(d, &["verify", "--map", "p.json"]);
    assert_eq!(v.json["symplectic"], Value::Bool(false));
    assert_eq!(v.json["antisymplectic"], Value::Bool(false));
    fixture(d, "sq.json", &["squeezed", "--r", "0.5"]);
    let t = sympwig(d, &["transform", "--cov", "sq.json", "--map", "p.json"]);
    assert_eq!(t.code, 0);
    assert_eq!(t.json["still_wigner_on_form1"], Value::Bool(false));
    assert_eq!(t.json["image_wigner_on_form2"], Value::Bool(true));
}

#[test]
fn darboux_reports_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "w.json", r#"{"n":1,"ordering":"x1..xn,p1..pn","kind":"form","matrix":[[0,4],[-4,0]]}"#);
    let r = sympwig(d, &["darboux", "--form", "w.json"]);
    assert_eq!(r.code, 0);
    assert!((f64_of(&r.json["scale"]) - 0.25).abs() <= 1e-15);
    assert_eq!(r.json["warning"], "NontrivialFormAtN1");
    assert!(f64_of(&r.json["residual"]) <= 1e-12);
}

#[test]
fn output_uses_sorted_keys_and_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "v.json", &["vacuum", "--n", "1"]);
    let r = sympwig(d, &["nw", "--cov", "v.json"]);
    let keys: Vec<&str> = r
        .stdout
        .lines()
        .filter_map(|l| l.trim().strip_prefix('"').and_then(|l| l.split('"').next()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let line = r.stdout.lines().find(|l| l.contains("\"lambda1\"")).unwrap();
    let number = line.split(": ").nth(1).unwrap().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{number}");
    assert!((number.parse::<f64>().unwrap() - 0.5).abs() <= 1e-15);
}

#[test]
fn ratio_search_reaches_the_requested_factor() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fixture(d, "om.json", &["two-scale-form"]);
    let r = sympwig(d, &["ratio", "--form1", "J", "--form2", "om.json", "--k", "10"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(f64_of(&r.json["ratio"]) >= 10.0);
    let same = sympwig(d, &["ratio", "--form1", "J", "--form2", "J", "--k", "2"]);
    assert_eq!(same.code, 2);
    assert_eq!(same.json["error"], "InvalidArgument");
}
