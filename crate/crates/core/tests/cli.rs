//! End-to-end runs of the `robobench` binary.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;

fn robobench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robobench")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    let out = robobench(&["run", path(&fixture("run.toml")), "--out", path(&run_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("63 final records"), "{stdout}");

    // a second run finds every cell finished
    let again = robobench(&["run", path(&fixture("run.toml")), "--out", path(&run_dir)]);
    assert_eq!(code(&again), 0);
    assert!(String::from_utf8_lossy(&again.stdout).contains("0 cells run this time, 63 final records"));

    let store = run_dir.join("records.jsonl");
    let imported = robobench(&["rate", "--store", path(&store), "--import", path(&fixture("feedback_sample.jsonl"))]);
    assert_eq!(code(&imported), 0, "{}", String::from_utf8_lossy(&imported.stderr));
    assert!(String::from_utf8_lossy(&imported.stdout).contains("imported 63 rating(s)"));

    // everything rated: the interactive session has nothing to ask
    let rate = robobench(&["rate", "--store", path(&store)]);
    assert_eq!(code(&rate), 0);
    assert!(String::from_utf8_lossy(&rate.stdout).contains("Nothing to rate"));

    let report = robobench(&["report", "--store", path(&store), "--prompts", "3,5"]);
    assert_eq!(code(&report), 0, "{}", String::from_utf8_lossy(&report.stderr));
    for file in
        ["aggregate.json", "fig5_error_rate.csv", "fig6_usage.csv", "fig7_scores_all.csv", "scores_prompts_3_5.csv"]
    {
        assert!(run_dir.join("report").join(file).exists(), "{file}");
    }

    let bad_filter = robobench(&["report", "--store", path(&store), "--prompts", "9"]);
    assert_eq!(code(&bad_filter), 2);

    let export = robobench(&["export-case-study", "--store", path(&store)]);
    assert_eq!(code(&export), 0, "{}", String::from_utf8_lossy(&export.stderr));
    assert!(run_dir.join("case_study").join("sample_12.robo").exists());
    assert!(run_dir.join("case_study").join("sealed_key.json").exists());
}

#[test]
fn validate_exit_codes() {
    let ok = robobench(&["validate", path(&fixture("programs/trial7.robo"))]);
    assert_eq!(code(&ok), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.robo");
    std::fs::write(&bad, "let x = 1\nfly_to(x)\n").unwrap();
    let out = robobench(&["validate", path(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains(":2:1:"));

    std::fs::write(&bad, "if (\n").unwrap();
    assert_eq!(code(&robobench(&["validate", path(&bad)])), 1);

    assert_eq!(code(&robobench(&["validate", path(&dir.path().join("missing.robo"))])), 2);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "backend = \"mock\"\n").unwrap();
    assert_eq!(code(&robobench(&["run", path(&config)])), 2);

    std::fs::write(&config, "backend = \"carrier pigeon\"\n").unwrap();
    assert_eq!(code(&robobench(&["run", path(&config)])), 2);

    assert_eq!(code(&robobench(&["run", path(&dir.path().join("none.toml"))])), 2);
    // clap usage errors
    assert_eq!(code(&robobench(&["frobnicate"])), 2);
}

#[test]
fn live_config_without_environment_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_robobench"))
        .args(["run", path(&fixture("live.toml")), "--out", "/nonexistent-robobench"])
        .env_remove("ROBOBENCH_ENDPOINT")
        .env_remove("ROBOBENCH_MODEL")
        .env_remove("ROBOBENCH_API_KEY")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}
