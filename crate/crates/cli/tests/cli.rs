use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ghcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghcut")).args(args).output().expect("binary runs")
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const P3: &str = "p ghcut 3 2\ne 1 2 1\ne 2 3 1\n";

/// Two triangles and an isolated vertex.
const SPLIT: &str = "p ghcut 7 6\ne 1 2 1\ne 2 3 1\ne 1 3 1\ne 4 5 2\ne 5 6 2\ne 4 6 2\n";

fn records(p: &str) -> Vec<Value> {
    fs::read_to_string(p).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn path_tree() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "p3.gr", P3);
    let out = ghcut(&["tree", &g]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let edges: Vec<&str> = text.lines().filter(|l| l.starts_with("e ")).collect();
    assert_eq!(edges, ["e 1 2 1", "e 2 3 1"]);
}

#[test]
fn malformed_header_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "bad.gr", "p ghcut three 2\n");
    let out = ghcut(&["tree", &g]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let g = file(dir.path(), "bad2.gr", "p ghcut 2 1\ne 1 2 1\ne 1 9 1\n");
    assert_eq!(ghcut(&["tree", &g]).status.code(), Some(2));
    assert_eq!(ghcut(&["tree", &path(dir.path(), "missing.gr")]).status.code(), Some(2));
}

#[test]
fn verify_off_logs_no_oracle_calls() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "p3.gr", P3);
    let m = path(dir.path(), "m.jsonl");
    assert!(ghcut(&["tree", &g, "--verify", "off", "--metrics", &m]).status.success());
    assert!(ghcut(&["tree", &g, "--metrics", &m]).status.success());
    let r = records(&m);
    assert_eq!(r[0]["oracle_calls"], 0);
    assert!(r[1]["oracle_calls"].as_u64().unwrap() > 0);
}

#[test]
fn metrics_fields_are_present() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "p3.gr", P3);
    let m = path(dir.path(), "m.jsonl");
    assert!(ghcut(&["tree", &g, "--metrics", &m]).status.success());
    let r = &records(&m)[0];
    for key in [
        "maxflow_calls",
        "maxflow_vertices",
        "maxflow_edges",
        "ed_calls",
        "ed_edges",
        "recursion_depth",
        "total_instance_edges",
        "instance_edges_per_m",
        "wall_ms",
    ] {
        assert!(r[key].as_f64().unwrap() >= 0.0, "{key}");
    }
    assert_eq!(r["m"], 2);
}

#[test]
fn empty_run_has_zero_counters() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "one.gr", "p ghcut 1 0\n");
    let m = path(dir.path(), "m.jsonl");
    assert!(ghcut(&["tree", &g, "--verify", "off", "--metrics", &m]).status.success());
    let r = &records(&m)[0];
    for key in ["maxflow_calls", "maxflow_edges", "ed_calls", "ed_edges", "oracle_calls", "total_instance_edges"] {
        assert_eq!(r[key], 0, "{key}");
    }
}

#[test]
fn forests_carry_the_marker() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "split.gr", SPLIT);
    let t = path(dir.path(), "split.tree");
    assert!(ghcut(&["tree", &g, "-o", &t, "--verify", "brute"]).status.success());
    let text = fs::read_to_string(&t).unwrap();
    assert_eq!(text.lines().next(), Some("disconnected 3"));
    assert!(!text.contains(" 0\n"), "no zero-weight edges: {text}");
    assert!(ghcut(&["verify", &g, &t]).status.success());
    // dropping the marker claims a connected graph
    let stripped = file(dir.path(), "stripped.tree", &text.replacen("disconnected 3\n", "", 1));
    assert_eq!(ghcut(&["verify", &g, &stripped]).status.code(), Some(1));
}

#[test]
fn wrong_tree_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "p3.gr", P3);
    let t = file(dir.path(), "bad.tree", "n 1\nn 2\nn 3\ne 1 2 2\ne 2 3 1\nf 1 1\nf 2 2\nf 3 3\n");
    assert_eq!(ghcut(&["verify", &g, &t]).status.code(), Some(1));
    assert_eq!(ghcut(&["verify", &g, &t, "--mode", "brute"]).status.code(), Some(1));
    assert!(ghcut(&["verify", &g, &t, "--epsilon", "1"]).status.success());
}

#[test]
fn approximate_tree_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "w.gr", "p ghcut 4 5\ne 1 2 30\ne 2 3 7\ne 3 4 50\ne 4 1 9\ne 1 3 2\n");
    let t = path(dir.path(), "w.tree");
    assert!(ghcut(&["approx", &g, "--epsilon", "1/10", "-o", &t]).status.success());
    assert!(ghcut(&["verify", &g, &t, "--epsilon", "0.1"]).status.success());
    assert_eq!(ghcut(&["approx", &g, "--epsilon", "0"]).status.code(), Some(2));
}

fn without_wall(path: &str) -> Vec<Value> {
    records(path)
        .into_iter()
        .map(|mut r| {
            r.as_object_mut().unwrap().remove("wall_ms");
            r
        })
        .collect()
}

#[test]
fn output_is_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("p ghcut 30 40\n");
    for i in 0..2 {
        let base = i * 15;
        for v in 0..15 {
            text += &format!("e {} {} 1\n", base + v + 1, base + (v + 1) % 15 + 1);
        }
        for v in 0..5 {
            text += &format!("e {} {} 1\n", base + v + 1, base + v + 8);
        }
    }
    let g = file(dir.path(), "two.gr", &text);
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let t = path(dir.path(), &format!("t{threads}.tree"));
        let m = path(dir.path(), &format!("m{threads}.jsonl"));
        let _ = fs::remove_file(&m);
        assert!(ghcut(&["tree", &g, "-o", &t, "--threads", threads, "--metrics", &m]).status.success());
        outputs.push((fs::read(&t).unwrap(), without_wall(&m)));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn bench_table_shape() {
    let run = |seed: &str, threads: &str| {
        let out = ghcut(&["bench", "--family", "random", "--sizes", "8,12,16", "--seed", seed, "--threads", threads]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let rows: Vec<Vec<String>> = text.lines().map(|l| l.split('\t').map(String::from).collect()).collect();
        rows
    };
    let a = run("5", "1");
    assert_eq!(a.len(), 4);
    assert_eq!(a[0][0], "family");
    assert!(a.iter().all(|r| r.len() == a[0].len()));
    let strip = |rows: &[Vec<String>]| rows.iter().map(|r| r[..r.len() - 1].to_vec()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&run("5", "2")));
    for family in ["bridged", "expander", "tree"] {
        assert!(ghcut(&["bench", "--family", family, "--sizes", "12"]).status.success());
    }
}

#[test]
fn ed_checks_its_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "split.gr", SPLIT);
    let d = file(dir.path(), "d.txt", "c demands\nd 1 1\nd 4 3\nd 6 2\n");
    for demand in ["degree", "uniform", d.as_str()] {
        let out = ghcut(&["ed", &g, "--phi", "1/3", "--demand", demand, "--trim", "--check"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with("p ed 7 "));
        let covered: usize = text.lines().filter(|l| l.starts_with("k ")).map(|l| l.split(' ').count() - 2).sum();
        assert_eq!(covered, 7);
    }
    let bad = file(dir.path(), "bad.txt", "d 9 1\n");
    assert_eq!(ghcut(&["ed", &g, "--phi", "1/3", "--demand", &bad]).status.code(), Some(2));
}
