use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn earlywork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_earlywork"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const WORKED: &str = r#"{"m": 2, "d": 4, "jobs": [3, 3, 2, 1]}"#;

#[test]
fn fptas_solves_worked_example() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i.json", WORKED);
    let out = dir.path().join("s.json");
    let r = earlywork(&[
        "solve",
        "--algo",
        "fptas",
        "--delta",
        "1/2",
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(&out);
    assert_eq!(doc["early_work_total"], 8);
    assert_eq!(doc["algorithm"], "fptas");
    assert_eq!(doc["parameters"]["q"], 2);
}

#[test]
fn every_algorithm_emits_verifiable_schedules() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "i.json",
        r#"{"m": 3, "d": 9, "jobs": [8, 7, 5, 4, 4, 3, 2, 1]}"#,
    );
    for (algo, extra) in [
        ("lpt", vec![]),
        ("bf", vec![]),
        ("dpexact", vec![]),
        ("eptas", vec!["--delta", "1/3"]),
        ("fptas", vec!["--delta", "1/3"]),
    ] {
        let out = dir.path().join(format!("{algo}.json"));
        let mut args = vec![
            "solve",
            "--algo",
            algo,
            "--input",
            s(&input),
            "--output",
            s(&out),
        ];
        args.extend(extra);
        let r = earlywork(&args);
        assert!(
            r.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
        let v = earlywork(&["verify", "--input", s(&input), "--schedule", s(&out)]);
        assert!(
            v.status.success(),
            "{algo}: {}",
            String::from_utf8_lossy(&v.stderr)
        );
        assert!(String::from_utf8_lossy(&v.stdout).starts_with("ok:"));
    }
}

#[test]
fn epsilon_selects_precision() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i.json", WORKED);
    let out = dir.path().join("s.json");
    let r = earlywork(&[
        "solve",
        "--algo",
        "fptas",
        "--epsilon",
        "1/2",
        "--input",
        s(&input),
        "--output",
        s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(&out);
    assert_eq!(doc["parameters"]["q"], 20);
    assert_eq!(doc["early_work_total"], 8);
}

#[test]
fn verify_rejects_mismatched_total() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i.json", WORKED);
    let sched = write(
        &dir,
        "s.json",
        r#"{"assignment": [0, 1, 0, 1], "loads": [5, 4], "early_work_total": 9, "algorithm": "bf", "parameters": {}}"#,
    );
    let r = earlywork(&["verify", "--input", s(&input), "--schedule", s(&sched)]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn generation_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let r = earlywork(&[
            "gen",
            "--n",
            "20",
            "--m",
            "3",
            "--d",
            "36",
            "--seed",
            "7",
            "--output",
            s(p),
        ]);
        assert!(r.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let r = earlywork(&[
        "gen", "--n", "20", "--m", "3", "--d", "36", "--dist", "boundary", "--seed", "7",
    ]);
    assert!(r.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(doc["jobs"].as_array().unwrap().len(), 20);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "i.json", WORKED);
    // approximation scheme without a precision
    assert_eq!(
        earlywork(&["solve", "--algo", "eptas", "--input", s(&input)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(earlywork(&["frobnicate"]).status.code(), Some(2));
    let bad = write(&dir, "bad.json", r#"{"m": 0, "d": 4, "jobs": [1]}"#);
    assert_eq!(
        earlywork(&["solve", "--algo", "lpt", "--input", s(&bad)])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        earlywork(&[
            "solve",
            "--algo",
            "fptas",
            "--delta",
            "2/3",
            "--input",
            s(&input)
        ])
        .status
        .code(),
        Some(3)
    );
    // 3^30 assignments exceed the enumeration budget
    let big = write(
        &dir,
        "big.json",
        &format!(
            r#"{{"m": 3, "d": 100, "jobs": [{}]}}"#,
            vec!["17"; 30].join(",")
        ),
    );
    assert_eq!(
        earlywork(&["solve", "--algo", "bf", "--input", s(&big)])
            .status
            .code(),
        Some(4)
    );
    // δ = 1/10 has far too many configurations for the default budget
    let r = earlywork(&[
        "solve",
        "--algo",
        "eptas",
        "--delta",
        "1/10",
        "--input",
        s(&big),
    ]);
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn bench_runs_small_suite() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.json",
        r#"{"first_seed": 1, "last_seed": 2, "machines": [2, 3], "job_counts": [5, 7],
            "due_dates": [8, 9, 36], "distributions": ["uniform", "boundary"], "deltas": [2, 3]}"#,
    );
    let out = dir.path().join("report.json");
    let r = earlywork(&["bench", "--suite", s(&suite), "--output", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stdout));
    let table = String::from_utf8_lossy(&r.stdout);
    assert!(table.contains("instances: 16, violations: 0"), "{table}");
    let report = json(&out);
    assert_eq!(report["violation_count"], 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 16);
}
