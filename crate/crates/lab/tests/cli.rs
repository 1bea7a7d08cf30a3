use std::path::PathBuf;
use std::process::{Command, Output};

use ckn_lab::suites::fmt_f64;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckn-lab")).args(args).env_remove(ckn_lab::OUT_ENV).output().unwrap()
}

#[test]
fn list_builtins_names_every_family() {
    let out = lab(&["list-builtins"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["euclidean", "cone", "counterexample", "half_line"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn validate_config_applies_overrides() {
    let cfg = fixture("pass.toml");
    let out = lab(&["validate-config", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("seed 99"));

    let out = lab(&["validate-config", "--config", cfg.to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let out = lab(&["validate-config", "--config", fixture("malformed.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = lab(&["validate-config", "--config", fixture("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fail_fixture_exits_1_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["run", "--config", fixture("fail.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(dir.path().join("ckn.csv")).unwrap();
    assert!(csv.starts_with("# schema=1 seed=7\nspace,"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["ok"], false);
}

#[test]
fn output_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ckn-lab"))
        .args(["run", "--config", fixture("fail.toml").to_str().unwrap(), "--seed", "3"])
        .env(ckn_lab::OUT_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(dir.path().join("ckn.csv")).unwrap();
    assert!(csv.starts_with("# schema=1 seed=3\n"));
}

proptest! {
    #[test]
    fn fmt_f64_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
