use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cojump(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cojump"))
        .args(args)
        .env_remove("COJUMP_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_estimate_sync_and_async_agree() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = cojump(&["simulate", "--seed", "5", "--out", s(&sim)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["bundle.csv", "coarse.csv", "truths.json", "manifest.json"] {
        assert!(sim.join(f).exists(), "{f} missing");
    }

    // Split the coarse panel into two time,value files.
    let coarse = std::fs::read_to_string(sim.join("coarse.csv")).unwrap();
    let mut lines = coarse.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (t, x1, x2) = (col("time"), col("X1"), col("X2"));
    let (mut f1, mut f2) = (String::from("time,value\n"), String::from("time,value\n"));
    for line in lines {
        let v: Vec<&str> = line.split(',').collect();
        f1.push_str(&format!("{},{}\n", v[t], v[x1]));
        f2.push_str(&format!("{},{}\n", v[t], v[x2]));
    }
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    std::fs::write(&p1, f1).unwrap();
    std::fs::write(&p2, f2).unwrap();

    let sync = cojump(&["estimate", s(&p1), s(&p2)]);
    assert_eq!(code(&sync), 0, "{}", String::from_utf8_lossy(&sync.stderr));
    let asyn = cojump(&["estimate", "--async", s(&p1), s(&p2)]);
    assert_eq!(code(&asyn), 0, "{}", String::from_utf8_lossy(&asyn.stderr));
    let a: Value = serde_json::from_slice(&sync.stdout).unwrap();
    let b: Value = serde_json::from_slice(&asyn.stdout).unwrap();
    assert_eq!(a["mode"], "sync");
    assert_eq!(a["ic_hat"], b["ic_hat"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    std::fs::write(&good, "time,value\n0,1\n1,1.1\n2,1.05\n").unwrap();
    let other = dir.path().join("other.csv");
    std::fs::write(&other, "time,value\n0,1\n1.5,1.1\n2,1.05\n").unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "time,value\n0,abc\n").unwrap();

    assert_eq!(code(&cojump(&["estimate", s(&good), s(&good)])), 0);
    let mismatch = cojump(&["estimate", s(&good), s(&other)]);
    assert_eq!(code(&mismatch), 3);
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("--async"));
    assert_eq!(
        code(&cojump(&["estimate", "--async", s(&good), s(&other)])),
        0
    );
    assert_eq!(code(&cojump(&["estimate", s(&bad), s(&good)])), 2);
    assert_eq!(
        code(&cojump(&["estimate", "--beta", "1.2", s(&good), s(&good)])),
        3
    );
    let out = dir.path().join("x");
    assert_eq!(
        code(&cojump(&["simulate", "--lambda1", "-1", "--out", s(&out)])),
        3
    );
    assert_eq!(code(&cojump(&["mc", "--paths", "0", "--out", s(&out)])), 3);
    assert_eq!(
        code(&cojump(&["mc", "--set", "nonsense", "--out", s(&out)])),
        2
    );
    // A constant path has zero threshold variance: undefined rho.
    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "time,value\n0,1\n1,1\n2,1\n").unwrap();
    assert_eq!(code(&cojump(&["estimate", s(&flat), s(&good)])), 0);
    assert_eq!(
        code(&cojump(&["--strict", "estimate", s(&flat), s(&good)])),
        4
    );
}

#[test]
fn mc_writes_outputs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = cojump(&["mc", "--paths", "10", "--seed", "3", "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in [
        "summary.json",
        "paths.csv",
        "normalized_bias.json",
        "normalized_qq.csv",
        "manifest.json",
    ] {
        assert!(a.join(f).exists(), "{f} missing");
    }
    assert_eq!(
        std::fs::read(a.join("summary.json")).unwrap(),
        std::fs::read(b.join("summary.json")).unwrap()
    );
    let summary = read_json(&a.join("summary.json"));
    assert_eq!(summary["n_paths"], 10);
    assert_eq!(summary["master_seed"], 3);
    let records = std::fs::read_to_string(a.join("paths.csv")).unwrap();
    assert_eq!(records.lines().count(), 11);
    let manifest = read_json(&a.join("manifest.json"));
    assert_eq!(manifest["master_seed"], 3);
    assert!(manifest["config"].as_str().unwrap().contains("lambda1"));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_cojump"))
        .args(["mc", "--paths", "2", "--out", s(&out)])
        .env("COJUMP_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&out.join("summary.json"))["master_seed"], 42);
}

#[test]
fn sweep_default_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = cojump(&["sweep", "--paths", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let matrix = std::fs::read_to_string(out.join("sweep_matrix.csv")).unwrap();
    let rows: Vec<&str> = matrix.lines().collect();
    assert_eq!(rows.len(), 1 + 12);
    assert_eq!(rows[0].split(',').count(), 1 + 19);
    let result = read_json(&out.join("sweep.json"));
    assert_eq!(result["mean_bias"].as_array().unwrap().len(), 12);
}
