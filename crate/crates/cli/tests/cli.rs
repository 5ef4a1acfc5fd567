use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ugcsp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugcsp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout))
    })
}

#[test]
fn params_one_liner() {
    let d = tempfile::tempdir().unwrap();
    let o = ugcsp(d.path(), &["params", "--alpha", "0.5", "--gamma", "0.25", "--epsilon", "0.25"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "d=679 ℓ=13 m=17 r=14 q=131072");
    let o = ugcsp(
        d.path(),
        &["params", "--alpha", "0.5", "--gamma", "0.25", "--epsilon", "0.25", "--json"],
    );
    assert_eq!(stdout_json(&o)["d"], 679);
}

#[test]
fn unsat_then_tree_solver() {
    let d = tempfile::tempdir().unwrap();
    assert!(ugcsp(d.path(), &["gen", "unsat", "--delta", "1/2", "--out", "u.gug"]).status.success());
    let o = ugcsp(
        d.path(),
        &["--no-timestamp", "solve", "tree", "--input", "u.gug", "--witness", "w.txt"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["fraction"], "2/5");
    assert_eq!(v["vacuous"], false);
    let w = std::fs::read_to_string(d.path().join("w.txt")).unwrap();
    assert_eq!(w.lines().count(), 5);
}

#[test]
fn empty_instance_is_vacuous() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("e.gug"), "gug m=2\nvertex a\n").unwrap();
    let o = ugcsp(d.path(), &["--no-timestamp", "solve", "brute", "--input", "e.gug"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!((v["fraction"].as_str(), v["vacuous"].as_bool()), (Some("1"), Some(true)));
}

#[test]
fn outputs_are_byte_identical_without_timestamp() {
    let d = tempfile::tempdir().unwrap();
    assert!(ugcsp(d.path(), &["gen", "klein", "--k4", "--out-dir", "k4"]).status.success());
    for out in ["a.json", "b.json"] {
        let o = ugcsp(
            d.path(),
            &[
                "--no-timestamp", "--seed", "7", "game", "--duplicator", "cops", "--klein",
                "k4/klein.json", "--k", "3", "--rounds", "40", "--output", out,
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(d.path().join("a.json")).unwrap();
    let b = std::fs::read(d.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert!(v.get("timestamp").is_none());
    assert_eq!(v["outcome"]["result"], "survived");

    let o = ugcsp(d.path(), &["gen", "klein", "--k4", "--out-dir", "k4b"]);
    assert!(o.status.success());
    for f in ["u1.gug", "u2.gug", "klein.json", "base.graph"] {
        assert_eq!(
            std::fs::read(d.path().join("k4").join(f)).unwrap(),
            std::fs::read(d.path().join("k4b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn timestamp_present_by_default() {
    let d = tempfile::tempdir().unwrap();
    assert!(ugcsp(d.path(), &["gen", "unsat", "--delta", "1/3", "--out", "u.gug"]).status.success());
    let v = stdout_json(&ugcsp(d.path(), &["solve", "tree", "--input", "u.gug"]));
    assert!(v["timestamp"].is_u64());
}

#[test]
fn random_pair_round_trip_and_tree_game() {
    let d = tempfile::tempdir().unwrap();
    let o = ugcsp(
        d.path(),
        &[
            "--seed", "3", "gen", "random-pair", "--petersen", "--ell", "2", "--m", "3", "--r", "3",
            "--girth-override", "--out-dir", "rp",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = ugcsp(
        d.path(),
        &[
            "--no-timestamp", "--assert-level", "full", "game", "--duplicator", "tree", "--pair",
            "rp/pair.json", "--k", "2", "--rounds", "60",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["outcome"]["result"], "survived");
    assert!(!String::from_utf8_lossy(&o.stdout).contains("\"ok\": false"));
}

#[test]
fn lift_writes_lifted_instance() {
    let d = tempfile::tempdir().unwrap();
    assert!(ugcsp(d.path(), &["gen", "klein", "--k4", "--out-dir", "k4"]).status.success());
    let o = ugcsp(d.path(), &["lift", "--input", "k4/u1.gug", "--output", "l.gug"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("l.gug")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("vertex ")).count(), 16);
}

#[test]
fn maxcut_on_a_five_cycle() {
    let d = tempfile::tempdir().unwrap();
    let mut g = String::from("graph\n");
    for i in 0..5 {
        g += &format!("e c{} c{}\n", i, (i + 1) % 5);
    }
    std::fs::write(d.path().join("c5.graph"), g).unwrap();
    let o = ugcsp(
        d.path(),
        &["--no-timestamp", "sdp", "maxcut", "--graph", "c5.graph", "--sdpa", "c5.dat-s"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let expect = 2.5 * (1.0 + (std::f64::consts::PI / 5.0).cos());
    assert!((v["value"].as_f64().unwrap() - expect).abs() < 1e-4);
    assert_eq!(v["opt"], 4.0);
    assert!(d.path().join("c5.dat-s").exists());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(ugcsp(d.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(ugcsp(d.path(), &["--help"]).status.code(), Some(0));
    // input error
    assert_eq!(ugcsp(d.path(), &["solve", "tree", "--input", "missing.gug"]).status.code(), Some(1));
    std::fs::write(d.path().join("bad.gug"), "gug m=2\nbundle a\n").unwrap();
    assert_eq!(ugcsp(d.path(), &["solve", "tree", "--input", "bad.gug"]).status.code(), Some(1));
    // precondition / budget
    assert!(ugcsp(d.path(), &["gen", "unsat", "--delta", "1/2", "--out", "u.gug"]).status.success());
    assert_eq!(ugcsp(d.path(), &["solve", "brute", "--input", "u.gug"]).status.code(), Some(2));
    assert_eq!(ugcsp(d.path(), &["solve", "propagate", "--input", "u.gug"]).status.code(), Some(2));
    // violation: four cops pin K_4
    assert!(ugcsp(d.path(), &["gen", "klein", "--k4", "--out-dir", "k4"]).status.success());
    let o = ugcsp(
        d.path(),
        &[
            "--seed", "2", "game", "--duplicator", "cops", "--klein", "k4/klein.json", "--k", "4",
            "--rounds", "300", "--output", "g.json",
        ],
    );
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(v["outcome"]["result"], "violation");
}

#[test]
fn report_collects_json() {
    let d = tempfile::tempdir().unwrap();
    std::fs::create_dir(d.path().join("run")).unwrap();
    std::fs::write(d.path().join("run/a.json"), "{\"x\": 1}").unwrap();
    std::fs::write(d.path().join("run/b.json"), "{\"y\": 2}").unwrap();
    let v = stdout_json(&ugcsp(d.path(), &["--no-timestamp", "report", "--dir", "run"]));
    assert_eq!(v["count"], 2);
    assert_eq!(v["runs"]["b.json"]["y"], 2);
}
