use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracmatroid"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_owned()
}

fn gen_graph(vertices: &str, edges: &str) -> String {
    let out = run(&["gen", "graph", "--vertices", vertices, "--edges", edges]);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn solve_single_line_and_triangle() {
    let out = run_stdin(&["solve", "-"], &gen_graph("2", "0-1"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["y"], serde_json::json!([2]));

    let out = run_stdin(&["solve", "-"], &gen_graph("3", "0-1,1-2,0-2"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["y"], serde_json::json!([1, 1, 1]));

    let out = run_stdin(&["solve", "-", "--mode", "brute", "--parallel"], &gen_graph("3", "0-1,1-2,0-2"));
    assert_eq!(json(&out)["y"], serde_json::json!([1, 1, 1]));
}

#[test]
fn solve_without_perfect_matching_exits_2() {
    let out = run_stdin(&["solve", "-"], &gen_graph("3", "0-1"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["outcome"], "none");
    assert_eq!(json(&out)["y"], Value::Null);
}

#[test]
fn solve_weighted_picks_the_heavy_matching() {
    let dir = tempfile::tempdir().unwrap();
    // Square 0-1-2-3-0 with two perfect matchings; the second is heavier.
    let inst = write(dir.path(), "c4.json", &gen_graph("4", "0-1,1-2,2-3,3-0"));
    let v = write(dir.path(), "v.csv", "1\n5\n1\n5\n");
    let out = run(&["solve", &inst, "--weighted", &v]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["y"], serde_json::json!([0, 2, 0, 2]));
    assert_eq!(json(&out)["objective"], serde_json::json!([1, 5, 1, 5]));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let dependent = write(dir.path(), "dep.json", r#"{"prime": 7, "n": 2, "lines": [{"a": [1, 2], "b": [2, 4]}]}"#);
    assert_eq!(run(&["solve", &dependent]).status.code(), Some(1));
    let composite = write(dir.path(), "comp.json", r#"{"prime": 9, "n": 2, "lines": []}"#);
    assert_eq!(run(&["solve", &composite]).status.code(), Some(1));
    assert_eq!(run_stdin(&["solve", "-"], "{").status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn oracle_outputs() {
    let out = run_stdin(&["oracle", "-"], &gen_graph("3", "0-1,1-2,0-2"));
    let v = json(&out);
    assert_eq!(v["value"], 3);
    assert_eq!(v["maximizers"], serde_json::json!([[1, 1, 1]]));

    let out = run_stdin(&["oracle", "-"], r#"{"prime": 101, "n": 2, "lines": []}"#);
    assert_eq!(json(&out)["value"], 0);

    let big = run(&["gen", "random", "--m", "9", "--n", "4"]);
    let out = run_stdin(&["oracle", "-"], std::str::from_utf8(&big.stdout).unwrap());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn oracle_with_weights_and_perfect_face() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "p.json", &gen_graph("4", "0-1,1-2,2-3"));
    let w = write(dir.path(), "w.csv", "1,9,1");
    let out = run(&["oracle", &inst, "--weights", &w]);
    assert_eq!(json(&out)["maximizers"], serde_json::json!([[0, 2, 0]]));
    let out = run(&["oracle", &inst, "--weights", &w, "--perfect"]);
    assert_eq!(json(&out)["maximizers"], serde_json::json!([[2, 0, 2]]));
    let out = run_stdin(&["oracle", "-", "--perfect"], &gen_graph("3", "0-1"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_commands() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = write(dir.path(), "c4.json", r#"{"rows": 4, "cols": 4, "entries": [1,0,0,1, 1,1,0,0, 0,1,1,0, 0,0,1,1]}"#);
    let out = run(&["lattice", "decompose", &c4, "1,-1,1,-1"]);
    let v = json(&out);
    assert_eq!(v["result"], "circuits");
    assert_eq!(v["circuits"].as_array().unwrap().len(), 1);

    let out = run(&["lattice", "decompose", &c4, "1,0,0,0"]);
    assert_eq!(json(&out), serde_json::json!({"result": "not_in_lattice"}));

    let tree = write(dir.path(), "tree.json", r#"{"rows": 2, "cols": 1, "entries": [[1], [1]]}"#);
    assert_eq!(json(&run(&["lattice", "lambda", &tree]))["lambda"], "infinity");
    assert_eq!(json(&run(&["lattice", "lambda", &c4]))["lambda"], 4);

    let near = json(&run(&["lattice", "near", &c4]));
    assert_eq!(near["count"], 2);
    assert_eq!(run(&["lattice", "near", &c4, "--factor", "3"]).status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let a = run(&["gen", "random", "--m", "4", "--n", "4", "--rng-seed", "7"]);
    let b = run(&["gen", "random", "--m", "4", "--n", "4", "--rng-seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "random", "--m", "4", "--n", "4", "--rng-seed", "8"]);
    assert_ne!(a.stdout, c.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let again = fracmatroid::format::instance_to_json(&fracmatroid::format::parse_instance(&text).unwrap());
    assert_eq!(again, text);

    let inter = run(&["gen", "intersection", "--m", "3", "--r", "2"]);
    let inst = fracmatroid::format::parse_instance(std::str::from_utf8(&inter.stdout).unwrap()).unwrap();
    assert_eq!((inst.m(), inst.n()), (3, 4));

    assert_eq!(run(&["gen", "graph", "--vertices", "2", "--edges", "0-2"]).status.code(), Some(1));
}

#[test]
fn weights_and_hitset() {
    let out = run(&["weights", "gen", "--m", "2", "--mode", "brute", "--brute-k", "2"]);
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["values"], serde_json::json!([2, 2]));

    let out = run(&["hitset", "gen", "--m", "1", "--n", "2", "--start", "1", "--count", "2"]);
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["abcd"], serde_json::json!([0, 0, 0, 1]));
    assert!(lines[0].get("T").is_some());

    let out = run_stdin(&["hitset", "test", "-"], &gen_graph("3", "0-1,1-2,0-2"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], "witness");

    let out = run_stdin(&["hitset", "test", "-", "--parallel"], &gen_graph("3", "0-1"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["result"], "no_witness");

    let out = run_stdin(&["hitset", "test", "-", "--budget", "5"], &gen_graph("3", "0-1"));
    assert_eq!(json(&out)["result"], "indeterminate");
}

#[test]
fn selfcheck_small_passes_and_catches_a_corrupt_pfaffian() {
    let out = run(&["selfcheck", "small"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 9);

    let out = run(&["selfcheck", "small", "--inject-fault", "corrupt-pfaffian"]);
    assert_ne!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL criterion 9")));
}
