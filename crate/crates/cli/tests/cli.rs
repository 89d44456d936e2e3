//! Runs the binary and checks outputs and the exit-code contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c2bordism"))
        .args(args)
        .env_remove("C2BORDISM_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_examples() {
    let o = run(&["eval", "RPs(2,0)", "--show", "phi"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "d1 + d0^2\n");
    assert_eq!(stdout(&run(&["eval", "RPs(1,0)"])), "0\n");
    assert_eq!(stdout(&run(&["eval", "u*d(1,0)"])), "x(2)*u + d(1,1)*a\n");
    assert_eq!(stdout(&run(&["eval", "Gamma(d(1,0))"])), "d(1,1)\n");
}

#[test]
fn eval_views() {
    let o = run(&["--truncation", "6", "eval", "d(1,0)", "--show", "hfp", "5"]);
    assert_eq!(stdout(&o), "x(2) + x(4)*e^2 + x(6)*e^4 + O(e^5)\n");
    let o = run(&["eval", "d(2,0)", "--show", "gamma-series", "4"]);
    assert_eq!(
        stdout(&o),
        "0: 0\n1: 0\n2: x(5)\n3: x(6) + x(2)*x(4)\n4: x(2)*x(5)\n"
    );
    let o = run(&["eval", "u^2", "--show", "restrict"]);
    assert_eq!(stdout(&o), "u^2\n");
    let o = run(&["eval", "a", "--show", "restrict"]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn parse_errors_exit_one_with_position() {
    let o = run(&["eval", "d(1) + a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("column 2"), "{}", stderr(&o));
    let o = run(&["eval", "a + "]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "a", "--show", "sideways"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "x(3)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["table", "--ring", "omega"]).status.code(), Some(1));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage"));
}

#[test]
fn degree_beyond_truncation_exits_three() {
    let o = run(&["table", "--ring", "omega", "--max-degree", "11"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["--truncation", "4", "eval", "x(6)"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn tables() {
    let o = run(&["table", "--ring", "omega", "--max-degree", "10"]);
    let text = stdout(&o);
    let dims: Vec<&str> = text.lines().map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(
        dims,
        ["1", "0", "1", "0", "2", "1", "3", "1", "5", "3", "8"]
    );
    let o = run(&["table", "--ring", "c2", "--max-degree", "3"]);
    assert_eq!(
        stdout(&o),
        "0 1 1 match=true\n1 0 0 match=true\n2 2 2 match=true\n3 2 2 match=true\n"
    );
    let o = run(&[
        "--format",
        "json",
        "table",
        "--ring",
        "phi",
        "--max-degree",
        "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["dim"].as_u64().unwrap())
        .collect();
    // Omega_* [d0, d1, ...] with |d_i| = i + 1.
    assert_eq!(dims, [1, 1, 3]);
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "--truncation",
        "8",
        "table",
        "--ring",
        "c2",
        "--max-degree",
        "8",
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    let args = ["eval", "(u + a*d(1,0))^3*RPs(2,1)"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "fgl"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
    let o = run(&["verify", "--suite", "completeness", "--max-degree", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degree 8 (presented 49, image 49)"));
    let o = run(&["verify", "--suite", "sw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("[FAIL]"));
}

fn write_cache(path: &Path, n: &str) {
    let o = run(&["--truncation", n, "cache", "save", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn cache_save_load_and_reuse() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    write_cache(&path, "6");
    let o = run(&["cache", "load", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("loaded N=6 window=8"));
    let before = fs::read(&path).unwrap();
    let o = run(&[
        "--truncation",
        "6",
        "--cache",
        path.to_str().unwrap(),
        "verify",
        "--suite",
        "fgl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&path).unwrap(), before);
    assert!(
        fs::read_dir(dir.path()).unwrap().count() == 1,
        "no temp files left behind"
    );
}

#[test]
fn smaller_cache_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    write_cache(&path, "4");
    let o = run(&[
        "--truncation",
        "7",
        "--cache",
        path.to_str().unwrap(),
        "eval",
        "d(1,0)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("cobordism-cache v1 N=7 window=9\n"));
}

#[test]
fn missing_cache_is_created() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("new.cache");
    let o = run(&[
        "--truncation",
        "5",
        "--cache",
        path.to_str().unwrap(),
        "eval",
        "u",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&path)
        .unwrap()
        .starts_with("cobordism-cache v1 N=5"));
}

#[test]
fn bad_caches_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    write_cache(&path, "5");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("v1", "v0", 1)).unwrap();
    let o = run(&["cache", "load", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("version"));
    fs::write(&path, text.replace("a 1 2 = b2\n", "a 1 2 = \n")).unwrap();
    assert_eq!(
        run(&["cache", "load", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let o = run(&["cache", "load", dir.path().join("absent").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_omega_names_the_degree_of_a_deleted_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    write_cache(&path, "6");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replace("a 1 2 = b2\n", "")).unwrap();
    let o = run(&[
        "--truncation",
        "6",
        "--cache",
        path.to_str().unwrap(),
        "verify",
        "--suite",
        "omega",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("degree 2"), "{}", stdout(&o));
}
