//! End-to-end tests of the binary: flags, exit codes, determinism, and the
//! JSON wire formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qduality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qduality"))
        .args(args)
        .env_remove("QDUALITY_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("qduality-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("write temp file");
    path
}

fn json_field<'a>(value: &'a serde_json::Value, key: &str) -> &'a serde_json::Value {
    value.get(key).unwrap_or_else(|| panic!("missing {key}"))
}

#[test]
fn analyze_werner_values() {
    let out = qduality(&["analyze", "--state", "werner", "--R", "0.8", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let b = json_field(&v, "b_max").as_f64().unwrap();
    assert!((b - 2.0 * std::f64::consts::SQRT_2 * 0.8).abs() < 1e-10);
    for key in ["delta_d", "delta_d_prime"] {
        let d = json_field(&v, key).as_f64().unwrap();
        assert!((d - 0.8).abs() < 1e-10);
    }
    assert_eq!(json_field(&v, "entangled").as_bool(), Some(true));
    assert_eq!(json_field(&v, "violates_bell").as_bool(), Some(true));
}

#[test]
fn analyze_singlet_mixture() {
    let out = qduality(&[
        "analyze", "--state", "bell-mixture", "--p", "1,0,0,0", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let b = json_field(&v, "b_max").as_f64().unwrap();
    assert!((b - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-10);
}

#[test]
fn analyze_maximally_mixed_file_is_all_zeros() {
    let mut re = [[0.0; 4]; 4];
    for (i, row) in re.iter_mut().enumerate() {
        row[i] = 0.25;
    }
    let im = [[0.0f64; 4]; 4];
    let body = serde_json::json!({ "re": re, "im": im }).to_string();
    let path = temp_file("mixed.json", &body);
    let out = qduality(&[
        "analyze", "--state", "file", "--path", path.to_str().unwrap(), "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json_field(&v, "b_max").as_f64(), Some(0.0));
    assert_eq!(json_field(&v, "delta_d").as_f64(), Some(0.0));
    assert_eq!(json_field(&v, "entangled").as_bool(), Some(false));
}

#[test]
fn analyze_json_state_round_trips() {
    let out = qduality(&[
        "analyze", "--state", "depolarized", "--R1", "0.6", "--R2", "0.3", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rho_text = json_field(&v, "rho").to_string();
    // Feed the printed state back in as a file.
    let path = temp_file("roundtrip.json", &rho_text);
    let again = qduality(&[
        "analyze", "--state", "file", "--path", path.to_str().unwrap(), "--format", "json",
    ]);
    assert!(again.status.success());
    let v2: serde_json::Value = serde_json::from_str(&stdout(&again)).unwrap();
    let d1 = json_field(&v, "delta_d").as_f64().unwrap();
    let d2 = json_field(&v2, "delta_d").as_f64().unwrap();
    assert!((d1 - d2).abs() < 1e-12);
    assert!((d1 - 0.6).abs() < 1e-10);
}

#[test]
fn verify_small_run_is_deterministic() {
    let a = qduality(&["verify", "--trials", "50", "--seed", "7", "--format", "json"]);
    let b = qduality(&["verify", "--trials", "50", "--seed", "7", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "verify output must be byte-identical");
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["random_axes"]["violations"].as_u64(), Some(0));
    assert_eq!(v["optimal_axes"]["violations"].as_u64(), Some(0));
    assert_eq!(v["same_meter"]["violations"].as_u64(), Some(0));
}

#[test]
fn verify_seed_env_fallback() {
    let with_flag = qduality(&["verify", "--trials", "10", "--seed", "42", "--format", "json"]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_qduality"))
        .args(["verify", "--trials", "10", "--format", "json"])
        .env("QDUALITY_SEED", "42")
        .output()
        .expect("binary runs");
    assert_eq!(with_flag.stdout, with_env.stdout);
}

#[test]
fn verify_rejects_zero_trials() {
    let out = qduality(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_csv_emits_row_per_trial() {
    let out = qduality(&["verify", "--trials", "4", "--seed", "7", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    // Header plus three sweeps x four trials.
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[0].starts_with("sweep,trial,dk"));
}

#[test]
fn filter_werner_keeps_bell_weights() {
    let out = qduality(&[
        "filter", "--state", "werner", "--R", "0.5", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let w = json_field(&v, "bell_weights").as_array().unwrap();
    let expected = [0.625, 0.125, 0.125, 0.125];
    for (got, want) in w.iter().zip(expected) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-10);
    }
    assert_eq!(v["iterations"].as_u64(), Some(0));
    // Identity filters.
    let fs = &v["filter_s"]["re"];
    assert_eq!(fs[0][0].as_f64(), Some(1.0));
    assert_eq!(fs[1][1].as_f64(), Some(1.0));
    assert_eq!(fs[0][1].as_f64(), Some(0.0));
}

#[test]
fn filter_pure_state_reaches_singlet() {
    let out = qduality(&[
        "filter", "--state", "pure", "--schmidt", "0.8", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p = json_field(&v, "success_prob").as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    let w = json_field(&v, "bell_weights").as_array().unwrap();
    assert!((w[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let b_after = json_field(&v, "b_max_after").as_f64().unwrap();
    assert!((b_after - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-8);
}

#[test]
fn filter_product_state_exits_singular() {
    let mut re = [[0.0; 4]; 4];
    re[0][0] = 1.0; // |VV><VV|
    let im = [[0.0f64; 4]; 4];
    let body = serde_json::json!({ "re": re, "im": im }).to_string();
    let path = temp_file("product.json", &body);
    let out = qduality(&[
        "filter", "--state", "file", "--path", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bad_parameters_exit_three() {
    assert_eq!(
        qduality(&["analyze", "--state", "werner", "--R", "1.5"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qduality(&["analyze", "--state", "werner"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qduality(&["analyze", "--state", "unknown-family"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qduality(&["analyze", "--state", "bell-mixture", "--p", "0.5,0.5,0.5"])
            .status
            .code(),
        Some(3)
    );
    // Unknown flags are also parameter errors.
    assert_eq!(qduality(&["analyze", "--bogus"]).status.code(), Some(3));
}

#[test]
fn invalid_state_files_exit_two() {
    let out = qduality(&["analyze", "--state", "file", "--path", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(2));

    let path = temp_file("broken.json", "{\"re\": []}");
    let out = qduality(&["analyze", "--state", "file", "--path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Valid JSON but unphysical matrix.
    let mut re = [[0.0; 4]; 4];
    re[0][0] = 2.0;
    re[1][1] = -1.0;
    let im = [[0.0f64; 4]; 4];
    let body = serde_json::json!({ "re": re, "im": im }).to_string();
    let path = temp_file("unphysical.json", &body);
    let out = qduality(&["analyze", "--state", "file", "--path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_floats_carry_seventeen_significant_digits() {
    let out = qduality(&["analyze", "--state", "werner", "--R", "0.8", "--format", "json"]);
    let text = stdout(&out);
    // Scientific notation with 16 fractional digits.
    assert!(
        text.contains("e0") || text.contains("e-"),
        "expected scientific-notation floats"
    );
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let b = v["b_max"].as_f64().unwrap();
    assert!((b - 2.2627416997969522).abs() < 1e-15, "lossless round-trip");
}
