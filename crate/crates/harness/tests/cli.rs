//! End-to-end checks of the `rwrs` binary: outputs, exit codes, and
//! byte-identical re-runs.

use std::path::Path;
use std::process::{Command, Output};

fn rwrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwrs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn cond_prints_the_exact_value() {
    let out = rwrs(&["cond", "--p", "0.5", "--eps", "0", "--record", "BB"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p_black         = 7.5000000000000000e-1"), "{text}");
    assert!(text.contains("backend         = filter"));
}

#[test]
fn cond_backends_agree() {
    for backend in ["filter", "enumeration", "oracle"] {
        let out = rwrs(&[
            "cond", "--p", "0.7", "--eps", "0.3", "--record", "BWB", "--backend", backend,
        ]);
        assert!(out.status.success(), "{backend}");
        let text = stdout(&out);
        let line = text.lines().next().expect("nonempty");
        let value: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
        let reference = 0.494_718_309_859_154_9;
        assert!((value - reference).abs() < 1e-12, "{backend}: {value}");
    }
}

#[test]
fn event_conditional_on_probe() {
    // on the probe record the four no-turn/last-turn cells partition path
    // space; ask for one of them
    let out = rwrs(&[
        "event",
        "--p",
        "0.6",
        "--eps",
        "0",
        "--record",
        "WWBBWBBWWBBWWBBWBBWWBBWWBBWWBB",
        "--event",
        "lt",
        "--l",
        "1",
        "--m",
        "1",
        "--L",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!((0.0..=1.0).contains(&value));
}

#[test]
fn build_names_match_their_expansions() {
    let out = rwrs(&["build", "sparseB", "--k", "3", "--K", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("WBBWBBW"));

    let out = rwrs(&["build", "goodPrefix", "--L", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("BBWBBWWBB"));

    let out = rwrs(&["build", "allB", "--n", "12"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("B^12"));
}

#[test]
fn usage_errors_exit_one() {
    let out = rwrs(&["cond", "--record", "BB"]); // missing --p
    assert_eq!(out.status.code(), Some(1));
    let out = rwrs(&["exp", "no-such-experiment"]);
    assert_eq!(out.status.code(), Some(1));
    let out = rwrs(&["cond", "--p", "0.3", "--eps", "0", "--record", "B"]);
    assert_eq!(out.status.code(), Some(1), "p below 1/2 is a domain error");
}

#[test]
fn failing_experiment_checks_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = rwrs(&[
        "exp",
        "cramer-empirical",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("[FAIL] finite-size-rate"));
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out_dir in [&first, &second] {
        let out = rwrs(&[
            "exp",
            "sparse-probe",
            "--seed",
            "7",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stdout(&out));
    }
    let a = std::fs::read(first.join("gaps.csv")).unwrap();
    let b = std::fs::read(second.join("gaps.csv")).unwrap();
    assert_eq!(a, b, "data files must be byte-identical across reruns");
}

#[test]
fn config_file_supplies_parameters_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "seed": 3,
            "format": "json",
            "params": {"extensions": "2", "l-max": "1"}
        })
        .to_string(),
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = rwrs(&[
        "exp",
        "good-config",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--param",
        "extensions=3",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    // json format from the file, parameter overridden from the CLI
    assert!(out_dir.join("instances.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["params"]["extensions"], "3");
    assert_eq!(manifest["seed"], 3);
    assert!(manifest["version"].as_str().unwrap().starts_with("rwrs-"));
}

#[test]
fn exp_list_shows_the_catalog() {
    let out = rwrs(&["exp", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "phase-diagram",
        "oracle-equivalence",
        "cut-lemmas",
        "delta-chain",
        "bad-probe",
        "black-run",
        "good-config",
        "sparse-probe",
        "cramer-empirical",
        "mc-calibration",
    ] {
        assert!(text.contains(id), "catalog missing {id}");
    }
}

#[test]
fn manifest_references_written_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = rwrs(&[
        "exp",
        "e1",
        "--out",
        dir.path().to_str().unwrap(),
        "--param",
        "p-points=20",
        "--param",
        "eps-points=10",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    for table in manifest["tables"].as_array().unwrap() {
        let file = table["file"].as_str().unwrap();
        assert!(
            Path::new(&dir.path().join(file)).exists(),
            "missing table file {file}"
        );
    }
}
