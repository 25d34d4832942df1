use std::process::{Command, Output};

use serde_json::Value;

fn qetorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qetorus")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qetorus(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn z_vanishes_at_half_period() {
    let v = json(&["eval", "--fn", "Z", "--x", "0.5"]);
    let (re, im) = complex(&v["values"][0]["value"]);
    assert!(re.hypot(im) < 1e-10);
    assert_eq!(v["schema"], 1);
}

#[test]
fn g0_is_one() {
    let v = json(&["eval", "--fn", "g", "--n", "0", "--x", "0.3+0.2i"]);
    let (re, im) = complex(&v["values"][0]["value"]);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn numeric_convolution_matches_closed_form() {
    let a = json(&["eval", "--fn", "conv", "--f", "Z", "--g", "Z", "--x", "0.25+0.9i"]);
    let b = json(&["eval", "--fn", "zconv", "--n", "2", "--x", "0.25+0.9i"]);
    let (ar, ai) = complex(&a["values"][0]["value"]);
    let (br, bi) = complex(&b["values"][0]["value"]);
    assert!((ar - br).hypot(ai - bi) < 1e-8);
}

#[test]
fn pole_is_reported_per_row() {
    let out = qetorus(&["eval", "--fn", "wp", "--x", "0", "--x", "0.3+0.1i", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "re_x,im_x,re_f,im_f,error");
    assert!(rows[1].contains("pole"));
    assert!(rows[2].ends_with(','));
}

#[test]
fn grid_is_csv() {
    let out = qetorus(&["eval", "--fn", "theta", "--grid", "0.1,0.9,0.1,0.4,3,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn unknown_function_is_an_error() {
    let out = qetorus(&["eval", "--fn", "nope", "--x", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn coefficient_entries() {
    let v = json(&["coeffs", "--matrix", "C", "--n", "4"]);
    let e = &v["entries"][0];
    assert_eq!((e["k"].as_u64(), e["num"].as_i64(), e["den"].as_i64(), e["dz_power"].as_u64()), (Some(0), Some(7), Some(360), Some(4)));

    let v = json(&["coeffs", "--matrix", "c", "--n", "2"]);
    let e = &v["entries"][0];
    assert_eq!((e["num"].as_i64(), e["den"].as_i64(), e["dz_power"].as_u64()), (Some(-1), Some(6), Some(2)));

    let v = json(&["coeffs", "--poly", "p", "--n", "2"]);
    let nums: Vec<i64> = v["coefficients"].as_array().unwrap().iter().map(|c| c["num"].as_i64().unwrap()).collect();
    assert_eq!(nums, [0, 1, -1]);

    // key order is stable
    let text = String::from_utf8(qetorus(&["coeffs", "--matrix", "c", "--n", "3"]).stdout).unwrap();
    let k = text.find("\"k\"").unwrap();
    assert!(k < text.find("\"num\"").unwrap() && text.find("\"den\"").unwrap() < text.find("\"dz_power\"").unwrap());
}

#[test]
fn large_exact_numbers_are_kept() {
    let v = json(&["coeffs", "--matrix", "c", "--n", "40"]);
    let num = v["entries"][0]["num"].to_string();
    assert!(num.trim_start_matches('-').len() > 20, "{num}");
}

#[test]
fn zeros_with_histogram() {
    let v = json(&["zeros", "--n", "12", "--bins", "4"]);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 12);
    assert_eq!(v["histogram"].as_array().unwrap().len(), 4);
    assert!(v["ks_distance"].as_f64().unwrap() < 0.5);
    let out = qetorus(&["zeros", "--n", "5", "--bins", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,index,x,fraction,rho_mass\n"));
}

#[test]
fn polynomial_suite_passes_exactly() {
    let out = qetorus(&["verify", "--suite", "polynomials"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!(!c["anchor"].as_str().unwrap().is_empty());
        assert_eq!(c["pass"], true, "{c}");
    }
    // the n = 0 polylog reading is reported, not asserted
    assert!(!v["observations"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let args = ["verify", "--suite", "weierstrass", "--seed", "7"];
    assert_eq!(strip(json(&args)), strip(json(&args)));
    let other = strip(json(&["verify", "--suite", "weierstrass", "--seed", "8"]));
    assert_eq!(other["seed"], 8);
}

#[test]
fn checks_are_sorted_and_params_echoed() {
    let v = json(&["verify", "--suite", "theta", "--tau-re", "0.1", "--tau-im", "0.9", "--quad-points", "128"]);
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["check_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    assert_eq!(v["params"]["tau_re"].as_f64(), Some(0.1));
    assert_eq!(v["params"]["quad_points"], 128);
}

#[test]
fn convolution_suite_at_two_node_counts() {
    for q in ["128", "256"] {
        let v = json(&["verify", "--suite", "convolution", "--quad-points", q]);
        assert_eq!(v["pass"], true, "quad points {q}");
    }
}

#[test]
fn full_run_passes() {
    let out = qetorus(&["verify", "--suite", "all", "--tau-im", "1.0", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn exit_codes() {
    assert_eq!(qetorus(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(qetorus(&["verify", "--tau-im", "-1"]).status.code(), Some(2));
    assert_eq!(qetorus(&["coeffs", "--matrix", "x", "--n", "2"]).status.code(), Some(2));
    // a sample density so coarse that checks fail must exit 1, not crash
    let out = qetorus(&["verify", "--suite", "kernels", "--quad-points", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("qetorus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.json");
    let out = qetorus(&["coeffs", "--matrix", "C", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["kind"], "C");
    std::fs::remove_dir_all(&dir).unwrap();
}
