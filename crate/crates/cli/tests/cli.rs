use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn obsdev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obsdev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&path)]);
    assert_eq!(code(&obsdev(&full)), 0);
    path
}

/// Coordinate matrix on the Gell-Mann basis with the given diagonal.
fn diagonal_map(n: usize, diag: impl Fn(usize) -> f64) -> Value {
    let m = n * n;
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { diag(i) } else { 0.0 }).collect())
        .collect();
    json!({ "dim": n, "basis": "gell-mann", "matrix": rows })
}

/// `A -> A^T`: flips the imaginary-part coordinates, which sit at odd offsets after the diagonal block.
fn transpose_map(n: usize) -> Value {
    diagonal_map(n, |i| {
        if i >= n && (i - n) % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    })
}

#[test]
fn deviation_routes_agree() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["hermitian", "--dim", "5", "--seed", "3"]);
    let spectral = obsdev(&["deviation", "--input", path_str(&a)]);
    assert_eq!(code(&spectral), 0);
    let variational = obsdev(&[
        "deviation",
        "--input",
        path_str(&a),
        "--route",
        "variational",
    ]);
    assert_eq!(code(&variational), 0);
    let (s, v) = (stdout_json(&spectral), stdout_json(&variational));
    let gap = s["value"].as_f64().unwrap() - v["value"].as_f64().unwrap();
    assert!(gap.abs() < 1e-6);
    assert_eq!(s["witness"]["dim"], 5);
    let factor = stdout_json(&obsdev(&[
        "deviation",
        "--input",
        path_str(&a),
        "--route",
        "factor",
    ]));
    assert!(factor["minimizer_lambda"].is_number());
}

#[test]
fn gen_is_reproducible() {
    let first = obsdev(&["gen", "unitary", "--dim", "4", "--seed", "11"]);
    let second = obsdev(&["gen", "unitary", "--dim", "4", "--seed", "11"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn metric_and_distinguisher() {
    let dir = TempDir::new().unwrap();
    let p = gen(
        &dir,
        "p.json",
        &["projection", "--dim", "4", "--rank", "1", "--seed", "1"],
    );
    let q = gen(
        &dir,
        "q.json",
        &["projection", "--dim", "4", "--rank", "2", "--seed", "2"],
    );
    let dv = stdout_json(&obsdev(&[
        "metric",
        "--a",
        path_str(&p),
        "--b",
        path_str(&q),
        "--kind",
        "dv",
    ]));
    let dm = stdout_json(&obsdev(&[
        "metric",
        "--a",
        path_str(&p),
        "--b",
        path_str(&q),
        "--kind",
        "dm",
    ]));
    assert!(dv["value"].as_f64().unwrap() <= dm["value"].as_f64().unwrap() + 1e-12);

    let split = stdout_json(&obsdev(&[
        "distinguish",
        "--p",
        path_str(&p),
        "--q",
        path_str(&q),
    ]));
    assert_eq!(split["equal"], false);
    assert!(split["witness"]["gap"].as_f64().unwrap() > 1e-6);
    let same = stdout_json(&obsdev(&[
        "distinguish",
        "--p",
        path_str(&p),
        "--q",
        path_str(&p),
    ]));
    assert_eq!(same["equal"], true);
    assert!(same["witness"].is_null());
}

#[test]
fn extreme_points() {
    let dir = TempDir::new().unwrap();
    let p = gen(
        &dir,
        "p.json",
        &["projection", "--dim", "3", "--rank", "2", "--seed", "5"],
    );
    let out = stdout_json(&obsdev(&["extreme", "--input", path_str(&p)]));
    assert_eq!(out["extreme"], true);
    assert_eq!(out["projection"]["dim"], 3);

    let mixed = write(
        &dir,
        "mixed.json",
        &json!({ "dim": 3, "re": [[0.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 1.0]], "im": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]] }),
    );
    let out = stdout_json(&obsdev(&["extreme", "--input", path_str(&mixed)]));
    assert_eq!(out["extreme"], false);

    let big = write(
        &dir,
        "big.json",
        &json!({ "dim": 2, "re": [[0.0, 0.0], [0.0, 3.0]], "im": [[0.0, 0.0], [0.0, 0.0]] }),
    );
    assert_eq!(code(&obsdev(&["extreme", "--input", path_str(&big)])), 2);
}

#[test]
fn check_verdicts_set_exit_code() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", &diagonal_map(3, |_| 1.0));
    let ok = obsdev(&["check", "--map", path_str(&id), "--property", "norm"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout_json(&ok)["verdict"], true);

    let squash = write(
        &dir,
        "squash.json",
        &diagonal_map(3, |i| if i == 1 { 0.5 } else { 1.0 }),
    );
    let bad = obsdev(&[
        "check",
        "--map",
        path_str(&squash),
        "--property",
        "deviation",
    ]);
    assert_eq!(code(&bad), 1);
    assert_eq!(stdout_json(&bad)["verdict"], false);
}

#[test]
fn decompositions() {
    let dir = TempDir::new().unwrap();
    let transpose = write(&dir, "t.json", &transpose_map(3));
    let form_path = dir.path().join("form.json");
    let out = obsdev(&[
        "decompose",
        "--map",
        path_str(&transpose),
        "--property",
        "deviation",
        "--out",
        path_str(&form_path),
    ]);
    assert_eq!(code(&out), 0);
    let form: Value = serde_json::from_str(&fs::read_to_string(&form_path).unwrap()).unwrap();
    assert_eq!(form["antiunitary"], true);
    assert_eq!(form["sign"], 1);

    // A -> A + tr(A)/n I preserves deviation but not the norm.
    let trace_shift = write(
        &dir,
        "shift.json",
        &diagonal_map(3, |i| if i == 0 { 2.0 } else { 1.0 }),
    );
    let dev = obsdev(&[
        "decompose",
        "--map",
        path_str(&trace_shift),
        "--property",
        "deviation",
    ]);
    assert_eq!(code(&dev), 0);
    let f = &stdout_json(&dev)["F"]["re"];
    assert!((f[0][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    let norm = obsdev(&[
        "decompose",
        "--map",
        path_str(&trace_shift),
        "--property",
        "norm",
    ]);
    assert_eq!(code(&norm), 1);
}

#[test]
fn small_suite_run() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "config.json",
        &json!({ "dims": [2, 3], "samples_per_case": 3, "seed": 7, "suites": ["lemma1", "var33", "theorem2"] }),
    );
    let report_path = dir.path().join("report.json");
    let out = obsdev(&[
        "suite",
        "--config",
        path_str(&config),
        "--out",
        path_str(&report_path),
    ]);
    assert_eq!(code(&out), 0);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().any(|l| l.starts_with("PASS")));
    let report: Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["overall"], true);

    let unknown = write(&dir, "bad.json", &json!({ "suites": ["nonsense"] }));
    assert_eq!(code(&obsdev(&["suite", "--config", path_str(&unknown)])), 2);
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&obsdev(&["deviation", "--input", path_str(&missing)])),
        2
    );

    let skew = write(
        &dir,
        "skew.json",
        &json!({ "dim": 2, "re": [[0.0, 1.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]] }),
    );
    assert_eq!(code(&obsdev(&["deviation", "--input", path_str(&skew)])), 2);
    assert_eq!(code(&obsdev(&["gen", "projection", "--dim", "3"])), 2);
    assert_eq!(code(&obsdev(&["gen", "hermitian", "--dim", "0"])), 2);
}
