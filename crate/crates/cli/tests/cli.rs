use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpack"))
        .args(args)
        .env_remove("HPACK_K")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn squares() -> String {
    let sets = [r#"[{"lengths":["3/10","3/10"]}]"#; 8].join(",");
    format!(r#"{{"d":2,"itemsets":[{sets}]}}"#)
}

#[test]
fn tk_seven() {
    let o = hpack(&["tk", "--k", "7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "26/15");
}

#[test]
fn k_from_environment_and_flag_wins() {
    let run = |env: &str, args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_hpack"))
            .args(args)
            .env("HPACK_K", env)
            .output()
            .unwrap();
        String::from_utf8(o.stdout).unwrap().trim().to_string()
    };
    assert_eq!(run("3", &["tk"]), "3");
    assert_eq!(run("3", &["tk", "--k", "5"]), "11/6");
}

#[test]
fn pack_bp_small_squares() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "sq.json", &squares());
    let o = hpack(&["pack-bp", &inst, "--k", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["objective"]["exact"], "1");
    assert_eq!(v["valid"], true);
    let ledger = v["ledger"].as_array().unwrap();
    assert!(!ledger.is_empty());
    assert!(ledger.iter().all(|b| b["pass"] == true));
}

#[test]
fn validate_solver_output() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "sq.json", &squares());
    let o = hpack(&["pack-mcsp", &inst]);
    assert!(o.status.success());
    let report = write(dir.path(), "out.json", &stdout(&o));
    assert_eq!(hpack(&["validate", &report]).status.code(), Some(0));
    assert_eq!(hpack(&["validate", &report, "--instance", &inst]).status.code(), Some(0));

    // move one placement onto another
    let mut v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let first = v["packing"]["placements"][0]["position"].clone();
    v["packing"]["placements"][1]["position"] = first;
    let broken = write(dir.path(), "broken.json", &v.to_string());
    assert_eq!(hpack(&["validate", &broken]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"d":2,"itemsets":[[{"lengths":["7/5","1/2"]}]]}"#);
    let o = hpack(&["pack-bp", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/itemsets/0/0/lengths/0"));

    let inst = write(dir.path(), "sq.json", &squares());
    assert_eq!(hpack(&["pack-hgap", &inst]).status.code(), Some(2), "missing epsilon");
    assert_eq!(hpack(&["pack-hgap", &inst, "--epsilon", "3/2"]).status.code(), Some(2));
    assert_eq!(
        hpack(&["pack-hgap", &inst, "--epsilon", "1/2", "--budget", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(hpack(&["pack-hgap", &inst, "--epsilon", "1/2", "--threads", "2"]).status.code(), Some(0));
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let a = hpack(&["gen", "--n", "6", "--d", "3", "--seed", "9", "--members", "2", "--profits"]);
    let b = hpack(&["gen", "--n", "6", "--d", "3", "--seed", "9", "--members", "2", "--profits"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "g.json", &stdout(&a));
    for cmd in ["pack-mcbp", "pack-mcsp"] {
        assert_eq!(hpack(&[cmd, &inst, "--rotations", "all"]).status.code(), Some(0), "{cmd}");
    }
    let o = hpack(&["pack-ks", &inst, "--epsilon", "1/2", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn oracle_tiny() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "t.json",
        r#"{"d":2,"itemsets":[[{"lengths":["3/5","3/5"]}],[{"lengths":["2/5","2/5"]}],[{"lengths":["3/5","2/5"]}]]}"#,
    );
    let o = hpack(&["oracle", &inst]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], "1");
}
