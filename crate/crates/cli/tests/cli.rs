use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn decompose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltl-decompose"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn controller_splits_into_two_blocks() {
    let out = decompose(&[spec("controller.ltl").to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["blocks"], serde_json::json!([["v", "w", "z"], ["t"]]));
    assert_eq!(v["env"], serde_json::json!(["p"]));
    assert_eq!(v["sys"], serde_json::json!(["v", "w", "z", "t"]));
    assert!(v["queries"].as_u64().unwrap() > 0);
    assert_eq!(v["audits"], serde_json::json!({}));
    assert!(v["evidence_path"].is_null());
}

#[test]
fn response_example_has_singleton_blocks() {
    let out = decompose(&[spec("response.ltl").to_str().unwrap(), "--format", "json", "--order", "lex"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_of(&out)["blocks"], serde_json::json!([["a"], ["b"]]));
}

#[test]
fn json_output_is_stable() {
    let path = spec("guard.ltl");
    let args = [path.to_str().unwrap(), "--format", "json", "--verify"];
    let first = decompose(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, decompose(&args).stdout);
}

#[test]
fn text_output_lists_blocks() {
    let out = decompose(&[spec("guard.ltl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("  {a, b, c}\n"), "{text}");
}

#[test]
fn quiet_prints_nothing() {
    let out = decompose(&[spec("guard.ltl").to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn audits_are_reported() {
    let out = decompose(&[
        spec("controller.ltl").to_str().unwrap(),
        "--format",
        "json",
        "--verify",
        "--audit-minimality",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let audits = &json_of(&out)["audits"];
    for kind in ["certificate", "soundness", "minimality"] {
        assert_eq!(audits[kind]["passed"], Value::Bool(true), "{kind}: {audits}");
    }
    assert_eq!(audits["soundness"]["checks"], 2);
    // {v, w, z} has six nonempty proper subsets, {t} none
    assert_eq!(audits["minimality"]["checks"], 6);
}

#[test]
fn undeclared_atom_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ltl");
    std::fs::write(&path, "env: p\nsys: a\nformula: G (p -> b)\n").unwrap();
    let out = decompose(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("`b`") && err.contains(":3:"), "{err}");
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(decompose(&["/nonexistent/spec.ltl"]).status.code(), Some(1));
    let guard = spec("guard.ltl");
    let path = guard.to_str().unwrap();
    assert_eq!(decompose(&[path, "--state-cap", "0"]).status.code(), Some(1));
    assert_eq!(decompose(&[path, "--engine", "external:"]).status.code(), Some(1));
    assert_eq!(decompose(&[path, "--engine", "magic"]).status.code(), Some(1));
}

#[test]
fn state_cap_exhaustion_is_an_engine_failure() {
    let out = decompose(&[spec("controller.ltl").to_str().unwrap(), "--state-cap", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("state cap"), "{}", stderr(&out));
}

#[test]
fn evidence_file_records_every_query() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("controller.ltl");
    std::fs::copy(spec("controller.ltl"), &path).unwrap();
    let out = decompose(&[path.to_str().unwrap(), "--format", "json", "--log-queries"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    let evidence = PathBuf::from(v["evidence_path"].as_str().unwrap());
    assert_eq!(evidence, dir.path().join("controller.ltl.evidence.jsonl"));
    let lines: Vec<Value> = std::fs::read_to_string(&evidence)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len() as u64, v["queries"].as_u64().unwrap());
    for l in &lines {
        assert!(l["query"].is_string());
        assert!(l["millis"].is_number());
        match l["verdict"].as_str().unwrap() {
            "sat" => assert!(l["witness"].as_str().unwrap().contains('|')),
            "unsat" => assert!(l["witness"].is_null()),
            other => panic!("verdict {other}"),
        }
    }
}

#[test]
fn external_engine_matches_internal() {
    let solver = format!("external:{}", env!("CARGO_BIN_EXE_ltlsat"));
    for name in ["controller.ltl", "response.ltl", "guard.ltl"] {
        let path = spec(name);
        let internal = decompose(&[path.to_str().unwrap(), "--format", "json"]);
        let external = decompose(&[path.to_str().unwrap(), "--format", "json", "--engine", &solver]);
        assert_eq!(external.status.code(), Some(0), "{name}: {}", stderr(&external));
        assert_eq!(json_of(&internal)["blocks"], json_of(&external)["blocks"], "{name}");
    }
}

#[test]
fn malformed_external_answer_is_an_engine_failure() {
    let out = decompose(&[spec("response.ltl").to_str().unwrap(), "--engine", "external:echo maybe"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed"), "{}", stderr(&out));
}

#[test]
fn failing_external_solver_is_an_engine_failure() {
    let out = decompose(&[spec("response.ltl").to_str().unwrap(), "--engine", "external:false"]);
    assert_eq!(out.status.code(), Some(2));
}
