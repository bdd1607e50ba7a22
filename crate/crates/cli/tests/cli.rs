use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterfan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn dense_b2_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b21.txt");
    fs::write(&path, "2\n0 1\n-2 0\n").unwrap();
    let report = json(&["dense", path.to_str().unwrap()]);
    assert_eq!(report["tool"], "clusterfan");
    assert_eq!(report["command"], "dense");
    assert_eq!(report["result"]["status"], "Complete");
    assert_eq!(report["result"]["justification"], "finite-type-complete");
}

#[test]
fn dense_b51_reports_the_gap() {
    let report = json(&["dense", "--fixture", "B_{5,1}"]);
    assert_eq!(report["result"]["status"], "NotDense");
    assert_eq!(report["result"]["justification"], "rank2-gap");
}

#[test]
fn mutate_walks_the_hexagon() {
    let out = run(&["mutate", "--matrix", "0 1; -2 0", "--principal", "--k", "1,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip_while(|l| l.trim() == "2").collect();
    assert_eq!(rows, ["0 1", "-2 0", "1 -1", "2 -1"]);
    let back = json(&["mutate", "--matrix", "0 1; -2 0", "--principal", "--k", "1,2,1,2,1,2"]);
    assert_eq!(back["result"]["matrix"], json(&["mutate", "--matrix", "0 1; -2 0", "--principal", "--k", "1,1"])["result"]["matrix"]);
}

#[test]
fn gfan_depth_zero_is_the_initial_cone() {
    let report = json(&["gfan", "--matrix", "0 1; -2 0", "--depth", "0"]);
    let result = &report["result"];
    assert_eq!(result["rays"].as_array().unwrap().len(), 2);
    assert_eq!(result["cones"].as_array().unwrap().len(), 1);
    assert_eq!(result["complete"], false);
}

#[test]
fn svg_has_one_line_per_ray() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fan.svg");
    let report = json(&["gfan", "--fixture", "B_{4,1}", "--depth", "6", "--svg", svg.to_str().unwrap()]);
    let rays = report["result"]["rays"].as_array().unwrap().len();
    let body = fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("<line").count(), rays);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = run(&["coverage", "--fixture", "B_{5,1}", "--depth", "20", "--samples", "2000", "--rng-seed", "3", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_clusterfan"))
        .args(["class", "-", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"3\n0 1 0\n-1 0 1\n0 -1 0\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["input"]["source"], "-");
    assert_eq!(report["result"]["verdict"], "Finite");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["type", "--fixture", "X7"]).status.code(), Some(0));
    assert_eq!(run(&["class", "--matrix", "0 1; 1 0"]).status.code(), Some(2));
    assert_eq!(run(&["class", "--fixture", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["class", "/nonexistent/matrix.txt"]).status.code(), Some(2));
    assert_eq!(run(&["class", "--fixture", "E8^(1,1)", "--budget", "10"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
