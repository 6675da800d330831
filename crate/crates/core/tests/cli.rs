use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hurwitz-tr"));
    for (k, _) in std::env::vars() {
        if k.starts_with("HURWITZ_TR_") {
            cmd.env_remove(k);
        }
    }
    cmd.envs(env.iter().copied()).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn oracle_row() {
    let o = run(&["oracle", "--N", "2", "--mu", "2", "--nu", "2", "--dmax", "0"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rows"][0]["value"], "1/2");
    assert_eq!(v["rows"][0]["genus"], 0);
}

#[test]
fn oracle_rejects_wrong_size() {
    let o = run(&["oracle", "--N", "3", "--mu", "2", "--nu", "2,1"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a partition of N = 3"));
}

#[test]
fn curve_a_data() {
    let o = run(&["curve", "--curve", &config("curve_a.json")], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["phi"], serde_json::json!(["1", "0", "-1"]));
    assert_eq!(v["branch"]["rational_roots"], serde_json::json!(["-1", "1"]));
    let lm3 = json(&run(&["curve", "--curve", &config("curve_lm3.json")], &[]));
    assert_eq!(lm3["branch"]["infinity_ramified"], true);
}

#[test]
fn bad_config_exits_2() {
    let o = run(&["curve", "--curve", r#"{"G": ["1", "1"], "gamma": "1"}"#], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exactly one of S and Spoly"));
    let o = run(&["curve", "--curve", "/nonexistent.json"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["curve", "--curve", r#"{"G": ["1", "1/0"], "S": ["0", "1"], "gamma": "1"}"#], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn toprec_emits_omega_and_hurwitz() {
    let o = run(&["toprec", "--g", "0", "--n", "3", "--curve", &config("curve_b.json"), "--emit-hurwitz", "--gamma-order", "4"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["omega"]["variables"], serde_json::json!(["z1", "z2", "z3"]));
    assert_eq!(v["hurwitz"]["agrees"], true);
    let o = run(&["toprec", "--g", "0", "--n", "2", "--curve", &config("curve_a.json")], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tau_dump() {
    let o = run(&["tau", "--curve", &config("curve_a.json"), "--order", "2"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["kind"], "tau");
    assert!(v["terms"].as_array().unwrap().iter().any(|t| t["coeff"] == "1" && t.as_object().unwrap().len() == 1));
    let o = run(&["tau", "--curve", &config("curve_a.json"), "--kind", "fgn", "--g", "0", "--n", "1", "--order", "3"], &[]);
    assert_eq!(json(&o)["kind"], "tildeFgn");
}

#[test]
fn verify_single_suite_and_caps() {
    let o = run(&["verify", "--suite", "cd"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!((v["suite"].clone(), v["maxOrderChecked"].clone(), v["residualZero"].clone()), ("cd".into(), 8.into(), true.into()));
    let v = json(&run(&["verify", "--suite", "cd"], &[("HURWITZ_TR_BIDEGREE", "5")]));
    assert_eq!(v["maxOrderChecked"], 5);
    // the flag wins over the environment
    let v = json(&run(&["verify", "--suite", "cd", "--bidegree", "4"], &[("HURWITZ_TR_BIDEGREE", "5")]));
    assert_eq!(v["maxOrderChecked"], 4);
    assert_eq!(run(&["verify", "--suite", "cd"], &[("HURWITZ_TR_BIDEGREE", "many")]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "cd", "--gamma-order", "9"], &[]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "bogus"], &[]).status.code(), Some(2));
}

#[test]
fn failing_suite_exits_1_and_names_the_identity() {
    let o = run(&["verify", "--suite", "f03"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["residualZero"], false);
    assert_eq!(v["firstFailure"], "d1 d2 d3 F03 = omega03, closed form with leading minus, CURVE-A");
}
