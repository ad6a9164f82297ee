//! The binary end to end: verbs, exit codes and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polysim")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn robustness_of_magic_state() {
    let out = run(&["robustness", "--state", &fixture("rho_T.json"), "--vertices", &fixture("sp1.json")]);
    let r = json(&out);
    assert!((r["value"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-7);
    assert_eq!(r["inputs"]["state"].as_str().unwrap().len(), 64);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn exact_robustness_of_a_stabilizer_state() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{"n":1,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#).unwrap();
    let r = json(&run(&["robustness", "--state", zero.to_str().unwrap(), "--vertices", "stabilizer:1", "--exact"]));
    assert_eq!(r["exact"], "1");
}

#[test]
fn enumerate_cnc() {
    let r = json(&run(&["enumerate", "--what", "cnc", "--n", "1"]));
    assert_eq!(r["labels"].as_array().unwrap().len(), 8);
    let cube: Value = serde_json::from_str(&std::fs::read_to_string(fixture("cube.json")).unwrap()).unwrap();
    let dual = json(&run(&["enumerate", "--what", "pauli-polytope", "--n", "1"]));
    assert_eq!(dual["vertices"], cube);
}

#[test]
fn bell_parity_on_the_tableau_is_reproducible() {
    let args =
        ["simulate", "--circuit", &fixture("bell.json"), "--backend", "tableau", "--shots", "1000", "--seed", "7"];
    let a = run(&args);
    let r = json(&a);
    let counts = r["counts"].as_object().unwrap();
    assert!(counts.keys().all(|k| k == "00" || k == "11"));
    assert_eq!(counts.values().map(|v| v.as_u64().unwrap()).sum::<u64>(), 1000);
    assert_eq!(r["seed"], 7);
    let b = run(&["--threads", "1"].iter().chain(args.iter()).copied().collect::<Vec<_>>());
    assert_eq!(a.stdout, b.stdout, "thread count changed the report");
}

#[test]
fn backends_agree_on_the_cluster_circuit() {
    let oracle = json(&run(&["simulate", "--circuit", &fixture("cluster.json")]));
    let vertex = json(&run(&["simulate", "--circuit", &fixture("cluster.json"), "--backend", "vertex"]));
    assert_eq!(oracle["distribution"], vertex["distribution"]);
    assert_eq!(vertex["distribution"]["0"], 0.5);
}

#[test]
fn derived_tables_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let tables = dir.path().join("tables.json");
    let circuit = fixture("bell.json");
    let derived = run(&["derive-updates", "--circuit", &circuit, "--exact", "--out", tables.to_str().unwrap()]);
    assert!(derived.status.success());
    let r =
        json(&run(&["simulate", "--circuit", &circuit, "--backend", "vertex", "--tables", tables.to_str().unwrap()]));
    assert_eq!(r["distribution"]["00"], 0.5);
    assert_eq!(r["distribution"]["11"], 0.5);
    assert!(r["inputs"]["tables"].is_string());
}

#[test]
fn estimate_reports_the_bound() {
    let r = json(&run(&["estimate", "--circuit", &fixture("magic_x.json"), "--event", "0", "--seed", "3"]));
    assert_eq!(r["estimate"]["N"], 5903);
    assert!((r["estimate"]["p_hat"].as_f64().unwrap() - 0.853553).abs() < 0.05);
}

#[test]
fn preservation_verdicts_set_the_exit_code() {
    let ok = run(&[
        "check-preservation",
        "--instrument",
        "destructive:Z",
        "--vertices",
        "local-polytope:1",
        "--vertices",
        "scalar",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["check-preservation", "--instrument", "gate:T", "--vertices", &fixture("sp1.json")]);
    assert_eq!(bad.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(r["passed"], false);
    let circuit = run(&["check-preservation", "--circuit", &fixture("bell.json")]);
    assert_eq!(circuit.status.code(), Some(0));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model":"clifford","n":1,"steps":[{"type":"gate","name":"H","qubits":[1]}]}"#).unwrap();
    let out = run(&["simulate", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 0"));
    assert_eq!(run(&["simulate", "--circuit", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(
        run(&["estimate", "--circuit", &fixture("magic_x.json"), "--event", "0", "--epsilon", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let magic_vertex = run(&["simulate", "--circuit", &fixture("magic_x.json"), "--backend", "vertex"]);
    assert_eq!(magic_vertex.status.code(), Some(2));
}

#[test]
fn small_bench_reports_timing() {
    let r = json(&run(&["bench", "--n", "50", "--gates", "2000", "--measurements", "20"]));
    assert_eq!(r["timing"]["measurements"], 20);
    assert!(r["timing"]["mean_gate_ns"].as_f64().unwrap() > 0.0);
}
