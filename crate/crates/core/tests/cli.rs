use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pauli-games"))
        .args(args)
        .env_remove("PAULI_GAMES_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn structure_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("structure.json");
    let o = cli(&["structure", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("commuting triples: 15"));
    let v = read_json(&out);
    assert_eq!(v["triples"].as_array().unwrap().len(), 15);
    assert_eq!(v["squares"].as_array().unwrap().len(), 10);
    assert_eq!(v["ams_ordered_pairs"], 90);
}

#[test]
fn ms_value_and_witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("ms.json");
    let report = dir.path().join("report.json");
    let o = cli(&[
        "value",
        "ms",
        "--threads",
        "2",
        "--witness",
        witness.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value: 8/9"));
    assert_eq!(
        read_json(&report)["value"],
        serde_json::json!({"num": 8, "den": 9})
    );

    let o = cli(&[
        "play",
        "ms",
        "--strategy",
        witness.to_str().unwrap(),
        "--rounds",
        "1000",
        "--seed",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1000 rounds of ms"));
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pauli-games"))
        .args(["dump-game", "psams", "--p", "1/7"])
        .env("PAULI_GAMES_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&dir.path().join("game-psams-1_7.json"));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 105);
    assert_eq!(v["equations"].as_array().unwrap().len(), 15);
}

#[test]
fn dump_game_prints_to_stdout_without_a_destination() {
    let o = cli(&["dump-game", "ams"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["game"], "ams");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 90);
}

#[test]
fn entangled_dump_lists_every_pair() {
    let o = cli(&["dump-strategy", "ms", "--entangled"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pairs = v.as_array().unwrap();
    assert_eq!(pairs.len(), 18);
    for p in pairs {
        assert!((p["prob"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn play_logs_replay_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = cli(&[
            "play",
            "ams",
            "--strategy",
            "entangled-perfect",
            "--procedure",
            "magic_square_first",
            "--rounds",
            "2000",
            "--seed",
            "17",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let first = run("a.json");
    assert_eq!(first, run("b.json"));
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["summary"]["win_rate"], 1.0);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 2000);
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        &["value", "psams", "--p", "0.5"][..],
        &["value", "ams", "--p", "1/7"],
        &["value", "psams", "--p", "3/2"],
        &["value", "chsh"],
        &["play", "ms", "--strategy", "/nonexistent/strategy.json"],
        &[
            "play",
            "ms",
            "--strategy",
            "entangled-perfect",
            "--procedure",
            "equation_first",
        ],
    ] {
        let o = cli(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn strategy_for_another_game_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("ms.json");
    assert_eq!(
        cli(&["dump-strategy", "ms", "--out", witness.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let o = cli(&[
        "play",
        "ams",
        "--strategy",
        witness.to_str().unwrap(),
        "--rounds",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
}
