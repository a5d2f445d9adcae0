use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_charp-hodge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn example_json(name: &str, prime: u64) -> Value {
    let o = run(&["examples", "show", name, "--prime", &prime.to_string()]);
    assert_eq!(code(&o), 0);
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn write_scenario(dir: &tempfile::TempDir, v: &Value) -> String {
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn examples_list_names_every_example() {
    let o = run(&["examples", "list"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["affine-2chart", "p1-log-rank2", "prop28-curve", "tensor-pair", "affine-global-lift"] {
        assert!(text.contains(name), "{name} missing from listing");
    }
    let o = run(&["examples", "list", "--report", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|e| !e["exercises"].as_array().unwrap().is_empty()));
}

#[test]
fn theorem_on_the_projective_line_passes() {
    let o = run(&["run", "p1-log-rank2", "--check", "theorem", "--prime", "5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn scenario_file_runs_with_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(&dir, &example_json("affine-2chart", 5));
    let o = run(&["run", &path, "--check", "lemma32", "lemma33", "descent", "--report", "json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&["verify", "--suite", "lemma33", "--prime", "5", "--seed", "7", "--report", "json", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn failing_claims_exit_with_one() {
    let o = run(&["run", "prop28-curve", "--check", "prop28", "--prime", "5"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn order_at_least_p_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = example_json("affine-2chart", 5);
    v["r"] = Value::from(5);
    let path = write_scenario(&dir, &v);
    let o = run(&["run", &path]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("higgs.locals[0]"), "{}", stderr(&o));
}

#[test]
fn broken_cocycle_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = example_json("affine-3chart", 5);
    v["tau"] = serde_json::json!([{"x": "1"}, {"x": "0"}, {"x": "0"}]);
    let path = write_scenario(&dir, &v);
    let o = run(&["run", &path]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("tau"), "{}", stderr(&o));
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"prime\": 5,").unwrap();
    assert_eq!(code(&run(&["run", path.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["run", "no-such-scenario.json"])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "lemma22", "--prime", "9"])), 2);
    assert_eq!(code(&run(&["run", "affine-2chart", "--check", "bogus"])), 2);
}

#[test]
fn passing_suite_exits_with_zero() {
    let o = run(&["verify", "--suite", "lemma32", "--prime", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("result: PASS"));
}
