use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_juliathermo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let cfg = format!(
        r#"{{
            "grid": {{"re_min": -0.1, "re_max": 0.1, "im_min": -0.1, "im_max": 0.1, "nx": 4, "ny": 3}},
            "dimension": {{"tol": 0.01, "depth_min": 8, "depth_max": 8}},
            {extra}
            "output": {{"csv": "{0}/scan.csv", "pgm": "{0}/scan.pgm", "summary": "{0}/summary.json"}}
        }}"#,
        dir.display()
    );
    let path = dir.join("config.json");
    std::fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn dim_reports_dimension_of_circle() {
    let out = run(&["dim", "0", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["delta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn dim_accepts_negative_parameters() {
    let out = run(&["dim", "-6", "0", "--tol", "1e-5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["delta"].as_f64().unwrap() < 1.0);
}

#[test]
fn exit_codes() {
    // Malformed input.
    assert_eq!(run(&["dim", "zero", "0"]).status.code(), Some(2));
    assert_eq!(run(&["dim", "0", "0", "--tol", "0"]).status.code(), Some(2));
    // Numerical: the basilica does not settle to 1e-6 by depth 10.
    assert_eq!(run(&["dim", "-1", "0", "--depth-max", "10"]).status.code(), Some(3));
    // Domain: outside the connectedness locus but |c| <= 2, and the shift-locus guard.
    assert_eq!(run(&["dim", "0.5", "0.5"]).status.code(), Some(4));
    assert_eq!(run(&["metric", "-6", "0"]).status.code(), Some(4));
    assert_eq!(run(&["critcond", "0.25", "0", "--nmax", "2"]).status.code(), Some(4));
}

#[test]
fn cycles_lists_exact_period() {
    let out = run(&["cycles", "0", "0", "--period", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 2);
    for c in cycles {
        assert_eq!(c["period"], 3);
        assert!((c["modulus"].as_f64().unwrap() - 8.0).abs() < 1e-10);
    }
    let attracting = json(&run(&["cycles", "-1", "0", "--period", "2"]));
    let julia = json(&run(&["cycles", "-1", "0", "--period", "2", "--julia-only"]));
    assert_eq!(attracting["cycles"].as_array().unwrap().len(), 1);
    assert!(julia["cycles"].as_array().unwrap().is_empty());
}

#[test]
fn stats_writes_census_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("census.csv");
    let out = run(&["stats", "0", "0", "--nmax", "3", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cycles"], 4);
    assert_eq!(v["reality_defect"], 0.0);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("period,re_lambda,im_lambda,modulus\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn critcond_has_sorted_keys_and_verdict() {
    let out = run(&["critcond", "-1", "0", "--nmax", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let keys: Vec<usize> = ["\"c0\"", "\"minima\"", "\"n_max\"", "\"running_inf\"", "\"verdict\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(json(&out)["verdict"], "condition-holds-up-to-horizon");
}

#[test]
fn metric_is_positive_definite_at_basilica() {
    let out = run(&["metric", "-1", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verdict"], "positive-definite");
    assert_eq!(v["g_metric"]["verdict"], "positive-definite");
}

#[test]
fn scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let cfg = cfg.to_str().unwrap();
    assert!(run(&["scan", "--config", cfg]).status.success());
    let csv1 = std::fs::read(dir.path().join("scan.csv")).unwrap();
    let pgm1 = std::fs::read(dir.path().join("scan.pgm")).unwrap();
    let sum1 = std::fs::read(dir.path().join("summary.json")).unwrap();
    assert!(run(&["scan", "--config", cfg]).status.success());
    assert_eq!(csv1, std::fs::read(dir.path().join("scan.csv")).unwrap());
    assert_eq!(pgm1, std::fs::read(dir.path().join("scan.pgm")).unwrap());
    assert_eq!(sum1, std::fs::read(dir.path().join("summary.json")).unwrap());

    let text = String::from_utf8(csv1).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_c,im_c,class,period,delta,flags"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(!text.contains('\r'));
    // Row-major from the top-left corner.
    assert!(rows[0].starts_with("-1.0000000000000001e-1,1.0000000000000001e-1,central,1,"));
    assert!(pgm1.starts_with(b"P5\n4 3\n255\n"));
    assert_eq!(pgm1.len(), b"P5\n4 3\n255\n".len() + 12);
}

#[test]
fn jittered_scan_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""stencil": {"seed": 11},"#);
    let cfg = cfg.to_str().unwrap();
    assert!(run(&["scan", "--config", cfg]).status.success());
    let first = std::fs::read(dir.path().join("scan.csv")).unwrap();
    assert!(run(&["scan", "--config", cfg]).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("scan.csv")).unwrap());
    assert!(String::from_utf8(first).unwrap().contains("jittered"));
}

#[test]
fn scan_config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#""colour": "grey","#);
    assert_eq!(run(&["scan", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert!(!dir.path().join("scan.csv").exists());
    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["scan", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}
