// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zoned-ledger"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn invalid_zone_size_is_a_config_error() {
    let out = run(&["simulate", "--seed", "1", "--n", "24", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m = 3"));
}

#[test]
fn randomized_commands_demand_a_seed() {
    for cmd in ["simulate", "attack", "availability", "mining"] {
        let out = run(&[cmd]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
    }
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"n": 24, "m": 3, "seed": 4}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["coverage", "--config", p]).status.code(), Some(2));
    let out = run(&["coverage", "--config", p, "--m", "6"]);
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    let rec: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(rec["record"], "coverage");
    assert_eq!(rec["period"], 7);

    std::fs::write(&path, r#"{"zones": 2}"#).unwrap();
    assert_eq!(run(&["coverage", "--config", p]).status.code(), Some(2));
}

#[test]
fn storage_cost_reports_the_formula() {
    let out = run(&[
        "storage-cost",
        "--q-bits",
        "1024",
        "--p-bits",
        "256",
        "--m",
        "8",
    ]);
    assert!(out.status.success());
    let first: serde_json::Value = serde_json::from_str(
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(first["baseline"], 1280.0);
    assert_eq!(first["distributed"], 689.0);
    assert_eq!(first["record"], "storage_cost");
    assert!(first["measured"].as_u64().unwrap() > 689);
}
