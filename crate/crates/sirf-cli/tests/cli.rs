//! CLI contract tests: flag validation, exit codes, and error reporting.

use std::path::Path;
use std::process::{Command, Output};

use sirf::simbench::{generate, SimulationSpec};

fn sirf_bin() -> &'static str {
    env!("CARGO_BIN_EXE_sirf")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(sirf_bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn sirf")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn fitted_bundle(dir: &Path) -> (String, String) {
    let train = generate(&SimulationSpec::single_and(180, 5, 21)).unwrap();
    let path = dir.join("train.csv");
    train.write_csv(&path, "y").unwrap();
    let train_path = path.to_str().unwrap().to_string();
    let out = run_in(
        dir,
        &[
            "fit",
            "--train",
            &train_path,
            "--response",
            "y",
            "--k-max",
            "2",
            "--trees",
            "10",
            "--seed",
            "1",
            "--out",
            "model.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (
        dir.join("model.json").to_str().unwrap().to_string(),
        train_path,
    )
}

#[test]
fn missing_required_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["fit", "--train", "t.csv", "--out", "m.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--response"));
}

#[test]
fn missing_file_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "fit",
            "--train",
            "absent.csv",
            "--response",
            "y",
            "--out",
            "m.json",
        ],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn unknown_model_and_zero_replicates_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["simulate", "--model", "quadratic", "--out-dir", "sim"],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("quadratic"));
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--model",
            "single-and",
            "--n",
            "100",
            "--p",
            "5",
            "--replicates",
            "0",
            "--out-dir",
            "sim",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_interaction_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (bundle, train) = fitted_bundle(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "predict",
            "--bundle",
            &bundle,
            "--interaction",
            "x2*",
            "--input",
            &train,
            "--out",
            "s.csv",
        ],
    );
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("x2*"));
}

#[test]
fn absent_interaction_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (bundle, train) = fitted_bundle(dir.path());
    // Feature exists but with a direction no leaf path uses together; a
    // nonexistent feature name is the sure case.
    let out = run_in(
        dir.path(),
        &[
            "predict",
            "--bundle",
            &bundle,
            "--interaction",
            "nope+",
            "--input",
            &train,
            "--out",
            "s.csv",
        ],
    );
    assert_eq!(code(&out), 3);
}

#[test]
fn interaction_string_round_trips_against_report() {
    let dir = tempfile::tempdir().unwrap();
    let (bundle, train) = fitted_bundle(dir.path());
    let out = run_in(
        dir.path(),
        &[
            "interactions",
            "--bundle",
            &bundle,
            "--train",
            &train,
            "--test",
            &train,
            "--response",
            "y",
            "--bootstraps",
            "2",
            "--rits",
            "40",
            "--seed",
            "4",
            "--keep-all",
            "--out-csv",
            "report.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let first = report.lines().nth(1).expect("at least one candidate");
    let rendered = first.split(',').next().unwrap();
    // The reported interaction parses back and scores rows.
    let out = run_in(
        dir.path(),
        &[
            "predict",
            "--bundle",
            &bundle,
            "--interaction",
            rendered,
            "--input",
            &train,
            "--out",
            "scores.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("scores.csv").exists());
}
