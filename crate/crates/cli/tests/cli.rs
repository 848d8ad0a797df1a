//! End-to-end tests of the `ptw` binary: exit codes, report formats,
//! determinism, and the forced-disagreement hook.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn ptw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(text.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

fn repo_spec(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn met_expectations_exit_zero() {
    let out = ptw(&["check", &repo_spec("parity.ptw")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("VALID (as expected)"));
    assert!(text.contains("witness {x = 1, y = 11}"));
    assert!(text.contains("engine agreement: ok"));
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(
        &dir,
        "bad.ptw",
        "var y : int[0..3];\n\
         program p { y := y }\n\
         check total_correctness {true} p {y == 0} expect valid;\n",
    );
    let out = ptw(&["check", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("EXPECTATION FAILED"));
}

#[test]
fn parse_error_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, "broken.ptw", "var y : int[0..3];\nprogram p { y := }\n");
    let out = ptw(&["check", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"));
}

#[test]
fn missing_file_exits_two() {
    let out = ptw(&["check", "/nonexistent/nowhere.ptw"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn max_states_guard_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(
        &dir,
        "big.ptw",
        "var a : int[0..999]; var b : int[0..999]; program p { skip }",
    );
    let out = ptw(&["check", &path, "--max-states", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeding"));
}

#[test]
fn json_report_has_stable_keys() {
    let out = ptw(&["check", &repo_spec("parity.ptw"), "--json"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["engine_agreement"], serde_json::json!(true));
    let directives = report["directives"].as_array().unwrap();
    assert_eq!(directives.len(), 5);
    for d in directives {
        for key in ["kind", "notion", "valid", "witness", "annotations", "trace"] {
            assert!(d.get(key).is_some(), "missing key {key}");
        }
    }
    assert_eq!(directives[1]["witness"], serde_json::json!({"x": 1, "y": 11}));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for flags in [vec![], vec!["--annotate", "--trace-fixpoints"], vec!["--json", "--annotate"]] {
        let mut args = vec!["check", &*Box::leak(repo_spec("parity.ptw").into_boxed_str())];
        args.extend(&flags);
        let first = ptw(&args);
        let second = ptw(&args);
        assert_eq!(first.stdout, second.stdout, "flags {flags:?}");
        assert!(first.status.success());
    }
}

#[test]
fn forced_disagreement_flags_and_exits_one() {
    let out = ptw(&["check", &repo_spec("parity.ptw"), "--corrupt-syntactic", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["engine_agreement"], serde_json::json!(false));
}

#[test]
fn all_engines_reach_the_same_verdicts() {
    let mut verdicts = Vec::new();
    for engine in ["semantic", "syntactic", "both"] {
        let out = ptw(&["check", &repo_spec("parity.ptw"), "--engine", engine, "--json"]);
        assert!(out.status.success(), "engine {engine}");
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let valids: Vec<serde_json::Value> = report["directives"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["valid"].clone())
            .collect();
        verdicts.push(valids);
    }
    assert_eq!(verdicts[0], verdicts[1]);
    assert_eq!(verdicts[1], verdicts[2]);
}

#[test]
fn timings_go_to_stderr_not_stdout() {
    let plain = ptw(&["check", &repo_spec("countdown.ptw")]);
    let timed = ptw(&["check", &repo_spec("countdown.ptw"), "--timings"]);
    assert_eq!(plain.stdout, timed.stdout);
    assert!(String::from_utf8_lossy(&timed.stderr).contains("checked in"));
}

#[test]
fn fuzz_smoke_run_passes() {
    let out = ptw(&["fuzz", "--seed", "3", "--count", "25", "--park-loops", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("25 programs"));
    assert!(text.contains("0 violations"));
    assert!(text.contains("result: PASS"));
}

#[test]
fn json_reports_validate_against_the_published_schema() {
    let schema_text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json"),
    )
    .unwrap();
    let schema_json: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let schema = jsonschema::JSONSchema::compile(&schema_json).unwrap();

    for (name, extra) in [
        ("parity.ptw", vec!["--annotate"]),
        ("sealed_box.ptw", vec!["--trace-fixpoints"]),
        ("countdown.ptw", vec!["--annotate", "--trace-fixpoints"]),
    ] {
        let mut args = vec!["check".to_string(), repo_spec(name), "--json".to_string()];
        args.extend(extra.iter().map(|s| s.to_string()));
        let out = Command::new(env!("CARGO_BIN_EXE_ptw"))
            .args(&args)
            .output()
            .unwrap();
        assert!(out.status.success(), "{name}");
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let violations: Vec<String> = match schema.validate(&report) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(violations.is_empty(), "{name}: {violations:?}");
    }
}

#[test]
fn repo_specs_all_pass() {
    for name in ["parity.ptw", "sealed_box.ptw", "countdown.ptw"] {
        let out = ptw(&["check", &repo_spec(name), "--annotate", "--trace-fixpoints"]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}
