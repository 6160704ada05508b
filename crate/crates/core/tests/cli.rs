//! The binary end to end: exit codes, examples and output determinism.

use std::process::Command;

fn modrep(args: &[&str]) -> (i32, String, String) {
    modrep_env(args, &[])
}

fn modrep_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_modrep"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn without_timing(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).expect("valid JSON");
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn ps_example_json() {
    let (code, out, _) = modrep(&["verify", "ps", "--p", "5", "--r", "22", "--m", "2", "--json"]);
    assert_eq!(code, 0);
    let v = without_timing(&out);
    assert_eq!(v["dims"]["quotient"], 18);
    assert_eq!(v["dims"]["induced"], 18);
    assert_eq!(v["theorem"], "ps");
}

#[test]
fn cuspidal_twisted_example() {
    let (code, out, _) = modrep(&["verify", "cuspidal-twisted", "--p", "3", "--f", "2", "--r", "2", "--json"]);
    assert_eq!(code, 0);
    let v = without_timing(&out);
    assert_eq!(v["dims"]["lhs"], 72);
    assert_eq!(v["dims"]["rhs"], 72);
}

#[test]
fn bad_binomial_guidance() {
    let (code, out, err) = modrep(&["verify", "ps", "--p", "5", "--r", "10", "--m", "1"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("divides binomial(10, 1)") && err.contains("verify split"), "{err}");
}

#[test]
fn failing_checks_exit_one() {
    let (code, out, _) = modrep(&["verify", "ps-twisted", "--p", "3", "--f", "2", "--r", "10,4", "--m", "1,0"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "ps"][..],
        &["verify", "cuspidal", "--p", "5"],
        &["verify", "bogus"],
        &["act", "--p", "3", "--g", "[[0,1],[1]]", "--poly", "X0"],
        &["dims", "--p", "3", "--f", "1", "--r", "10,4", "--m", "1,0"],
        &["verify", "ps", "--p", "4", "--r", "9", "--m", "1"],
    ] {
        assert_eq!(modrep(args).0, 2, "{args:?}");
    }
}

#[test]
fn act_and_dims_examples() {
    let (code, out, _) = modrep(&["act", "--p", "3", "--g", "[[0,1],[1,0]]", "--poly", "X0^5"]);
    assert_eq!((code, out.trim()), (0, "Y0^5"));
    let (code, out, _) = modrep(&["dims", "--p", "3", "--f", "2", "--r", "10,4", "--m", "1,0"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("20"));
}

#[test]
fn reduce_in_ideal_difference() {
    let (code, out, _) = modrep(&["reduce", "--p", "3", "--f", "2", "--r", "10,4", "--poly", "X0^9*Y0*X1^4-X0^7*Y0^3*X1^2*Y1^2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(code, 0, "{out}");
    assert_eq!(v["normal_form"], "0");
    assert_eq!(v["in_ideal"], true);
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn same_seed_same_json() {
    let args = ["verify", "periodicity", "--p", "5", "--m", "2", "--r", "22", "--s", "18", "--json", "--seed", "7"];
    let a = modrep(&args).1;
    let b = modrep(&args).1;
    assert_eq!(without_timing(&a), without_timing(&b));
    let lem = ["verify", "lemmas", "--seed", "3", "--json"];
    assert_eq!(without_timing(&modrep(&lem).1), without_timing(&modrep(&lem).1));
}

#[test]
fn jobs_do_not_change_reports() {
    for base in [
        &["verify", "cuspidal", "--p", "5", "--r", "1", "--json"][..],
        &["verify", "lemmas", "--json"],
        &["verify", "dual-image", "--p", "3", "--m", "1", "--r", "12", "--json"],
    ] {
        let one = without_timing(&modrep(&[base, &["--jobs", "1"]].concat()).1);
        let four = without_timing(&modrep(&[base, &["--jobs", "4"]].concat()).1);
        assert_eq!(one, four, "{base:?}");
    }
}

#[test]
fn enumeration_guard_respects_env() {
    let (code, _, err) = modrep_env(&["verify", "cuspidal", "--p", "5", "--r", "1"], &[("MODREP_MAX_Q", "3")]);
    assert_eq!(code, 2);
    assert!(err.contains("MODREP_MAX_Q"), "{err}");
}

#[test]
fn reports_match_shipped_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/report.schema.json")).expect("schema parses");
    let (_, out, _) = modrep(&["verify", "dual-image", "--p", "3", "--m", "1", "--r", "12", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let obj = report.as_object().unwrap();
    let props = schema["properties"].as_object().unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(obj.contains_key(key.as_str().unwrap()), "missing {key}");
    }
    assert!(obj.keys().all(|k| props.contains_key(k)));
    for c in report["checks"].as_array().unwrap() {
        assert_eq!(c.as_object().unwrap().len(), 3);
    }
}
