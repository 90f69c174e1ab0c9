use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"))
}

fn run(command: &str, config: &Path, out: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_debranges"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("SAMPLER_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn read(prefix: &Path, ext: &str) -> String {
    std::fs::read_to_string(prefix.with_extension(ext)).unwrap()
}

fn all_numbers_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_numbers_finite),
        Value::Object(o) => o.values().all(all_numbers_finite),
        Value::Null => false,
        _ => true,
    }
}

fn run_ok(command: &str) -> (String, Value) {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join(command);
    let out = run(command, &config(command), &prefix, "2");
    assert!(out.status.success(), "{command}: {}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_str(&read(&prefix, "json")).unwrap();
    assert!(all_numbers_finite(&json), "{json}");
    (read(&prefix, "csv"), json)
}

#[test]
fn stability_run_reports_bounded_error_and_cauchy_tails() {
    let (csv, json) = run_ok("stability");
    assert!(csv.starts_with("z_re,z_im,ref_re,ref_im,rec_re,rec_im,abs_err\n"));
    assert_eq!(csv.lines().count(), 1 + 21 * 5);
    let sup = json["sup_error"].as_f64().unwrap();
    let gain = json["stability_constant"].as_f64().unwrap();
    assert!(sup > 0.0 && sup <= 0.1 * gain * (1.0 + 1e-9) + json["exact_sup_error"].as_f64().unwrap());
    let tails: Vec<f64> = json["tail_sums"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(tails.windows(2).all(|w| w[1] >= w[0]));
    let total = *tails.last().unwrap();
    // The last quarter of the terms moves the partial sum by well under one percent.
    assert!(total - tails[3 * tails.len() / 4] < 0.01 * total);
    assert!(json["decay_exponent"].as_f64().unwrap() < -1.5);
}

#[test]
fn airy_zero_table() {
    let (csv, json) = run_ok("airy");
    assert!(csv.starts_with("n,value,residual\n"));
    assert_eq!(csv.lines().count(), 1 + 51);
    assert!(json["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(json["kind"], "wi");
}

#[test]
fn remaining_commands_run() {
    let (csv, json) = run_ok("spectrum");
    assert!(csv.starts_with("n,lambda,k_diag\n"));
    assert_eq!(json["count"], 81);
    let (csv, json) = run_ok("kernel");
    assert!(csv.starts_with("re_z,im_z,re_val,im_val\n"));
    assert!(json["max_abs"].as_f64().unwrap() > 0.0);
    let (_, json) = run_ok("reconstruct");
    assert!(json["sup_error"].as_f64().unwrap() < 1e-3, "{json}");
    let (_, json) = run_ok("calibrate");
    assert!((json["calibration_factor"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("stability")).unwrap().replace(
        r#""mode": "adversarial", "z0": [0.5, 0]"#,
        r#""mode": "random", "seed": 11"#,
    );
    let cfg = dir.path().join("random.json");
    std::fs::write(&cfg, text).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("stability", &cfg, &a, "1").status.success());
    assert!(run("stability", &cfg, &b, "4").status.success());
    for ext in ["csv", "json"] {
        assert_eq!(read(&a, ext), read(&b, ext));
    }
}

#[test]
fn malformed_config_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ \"hamiltonian\": [ ").unwrap();
    let prefix = dir.path().join("out");
    let out = run("spectrum", &cfg, &prefix, "2");
    assert_eq!(out.status.code(), Some(2));
    assert!(!prefix.with_extension("csv").exists() && !prefix.with_extension("json").exists());
    // Well-formed JSON with an invalid Hamiltonian is a configuration error too.
    std::fs::write(&cfg, r#"{"hamiltonian": [{"from": 0, "to": 1, "type": "constant_diagonal", "g0": 0.9}]}"#).unwrap();
    let out = run("spectrum", &cfg, &prefix, "2");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() == 1);
}

#[test]
fn help_lists_csv_columns() {
    let out = Command::new(env!("CARGO_BIN_EXE_debranges")).arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success());
    for cols in ["n, lambda, k_diag", "z_re, z_im, ref_re, ref_im, rec_re, rec_im, abs_err", "n, value, residual"] {
        assert!(text.contains(cols), "{text}");
    }
}
