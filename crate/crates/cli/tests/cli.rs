use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgitkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgitkit"))
        .args(args)
        .env("VGITKIT_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn status_p1() {
    let scene = data("p1.scene.json");
    let v = json(&run(&["status", "--scene", &scene, "--lin", "O11"]));
    let st = &v["results"]["statuses"];
    assert_eq!(st["[1:0]"], "Unstable");
    assert_eq!(st["[0:1]"], "Unstable");
    assert_eq!(st["[1:1]"], "Stable");
    assert_eq!(v["command"], "status");
    assert!(v["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn walls_walkthrough() {
    let scene = data("walkthrough.scene.json");
    let v = json(&run(&[
        "walls", "--scene", &scene, "--from", "L0", "--to", "L1",
    ]));
    assert_eq!(v["results"]["walls"], serde_json::json!(["1/2"]));
}

#[test]
fn mu_example() {
    let scene = data("p1.scene.json");
    let v = json(&run(&[
        "mu", "--scene", &scene, "--point", "[1:0]", "--lin", "O11", "--lambda", "1",
    ]));
    assert_eq!(v["results"]["mu"], "-1");
    let v = json(&run(&[
        "mu", "--scene", &scene, "--point", "[1:0]", "--lin", "O11", "--lambda", "-1",
    ]));
    assert_eq!(v["results"]["mu"], "1");
}

#[test]
fn chambers_and_semicont() {
    let scene = data("walkthrough.scene.json");
    let v = json(&run(&[
        "chambers", "--scene", &scene, "--from", "L0", "--to", "L1",
    ]));
    let ch = v["results"]["chambers"].as_array().unwrap();
    assert_eq!(ch.len(), 2);
    assert_eq!(ch[0]["statuses"]["x"], "Stable");
    assert_eq!(
        v["results"]["on_walls"][0]["statuses"]["x"],
        "StrictlySemistable"
    );
    assert_eq!(ch[1]["statuses"]["x"], "Unstable");
    let v = json(&run(&[
        "semicont", "--scene", &scene, "--from", "L0", "--to", "L1",
    ]));
    assert_eq!(v["results"]["holds"], true);
}

#[test]
fn audit_and_profile() {
    let scene = data("walkthrough.scene.json");
    let v = json(&run(&[
        "audit", "--scene", &scene, "--from", "L0", "--to", "L1",
    ]));
    assert_eq!(v["results"]["grid"], 4);
    assert_eq!(v["results"]["distinct_loci"], 3);
    assert_eq!(v["results"]["matches_chambers"], true);
    assert_eq!(v["results"]["stable_under_doubling"], true);
    let v = json(&run(&[
        "mfunc", "--scene", &scene, "--point", "x", "--from", "L0", "--to", "L1", "--grid", "4",
    ]));
    let samples = v["results"]["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 5);
    assert_eq!(samples[2]["m"]["certificate"]["mu"], "0");
}

#[test]
fn mfunc_at_t() {
    let scene = data("walkthrough.scene.json");
    let v = json(&run(&[
        "mfunc", "--scene", &scene, "--point", "x", "--from", "L0", "--to", "L1", "--t", "1/4",
    ]));
    assert_eq!(v["results"]["m"]["certificate"]["mu"], "1/2");
    assert_eq!(v["results"]["m"]["sign_status"], "Stable");
}

#[test]
fn strata_listing() {
    let scene = data("p1.scene.json");
    let v = json(&run(&["strata", "--scene", &scene, "--lin", "O11"]));
    let s = &v["results"]["strata"][0];
    assert_eq!(s["closed_orbit"], true);
    assert_eq!(
        v["results"]["fingerprint_classes"]
            .as_array()
            .unwrap()
            .len(),
        3
    );
}

#[test]
fn hilb_check() {
    let scene = data("hilb.scene.json");
    let v = json(&run(&[
        "hilb-check",
        "--scene",
        &scene,
        "--point",
        "z",
        "--twin",
        "z_twin",
        "--lambda",
        "1",
    ]));
    let r = &v["results"];
    assert_eq!(r["points"][0]["m_star"], 2);
    assert_eq!(r["points"][0]["status_Linf"], "Stable");
    assert_eq!(r["points"][0]["convergence"][1]["residual"], "-3/2");
    assert_eq!(r["cycle_invariance"]["m_star"], serde_json::json!([2, 3]));
    assert_eq!(r["cycle_invariance"]["passes"], true);
}

#[test]
fn refusal_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let text = std::fs::read_to_string(data("p1.scene.json"))
        .unwrap()
        .replace("\"hm_sanctioned\": true", "\"hm_sanctioned\": false");
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["status", "--scene", p, "--lin", "O11"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&run(&[
        "status",
        "--scene",
        p,
        "--lin",
        "O11",
        "--allow-numerical",
    ]));
    assert_eq!(v["results"]["numerical_only"], true);
    assert_eq!(v["results"]["statuses"]["[1:1]"], "Stable");
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let text = std::fs::read_to_string(data("p1.scene.json"))
        .unwrap()
        .replace("\"[1:1]\"", "\"[1:0]\"");
    std::fs::write(&path, text).unwrap();
    let out = run(&["status", "--scene", path.to_str().unwrap(), "--lin", "O11"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points[2].name: duplicate"));

    let out = run(&["status", "--scene", "/nonexistent.json", "--lin", "O11"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let scene = data("p1.scene.json");
    let out = run(&[
        "mu", "--scene", &scene, "--point", "[1:0]", "--lin", "O11", "--lambda", "1,x",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_projection() {
    let scene = data("walkthrough.scene.json");
    let out = run(&[
        "walls", "--scene", &scene, "--from", "L0", "--to", "L1", "--emit", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.contains("results.walls[0],1/2\n"));
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let scene = data("walkthrough.scene.json");
    let args = [
        "chambers",
        "--scene",
        scene.as_str(),
        "--from",
        "L0",
        "--to",
        "L1",
    ];
    let a = run_env(&args, "1");
    let b = run_env(&args, "4");
    let c = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}
