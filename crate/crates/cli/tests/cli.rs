use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn contactkit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contactkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("CONTACTKIT_SEED")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn verify_passes_on_both_models() {
    let tmp = tempfile::tempdir().unwrap();
    for model in ["flat", "torus"] {
        let dir = tmp.path().join(model);
        let o = contactkit(&["verify", "--model", model, "--n", "1"], &dir);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        let r = report(&dir);
        assert_eq!(r["all_pass"], true);
        assert_eq!(r["checks"].as_array().unwrap().len(), 11);
    }
}

#[test]
fn configuration_errors_exit_two_and_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("bad");
    let o = contactkit(&["verify", "--tol-surface", "-1e-8"], &dir);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.exists());

    let o = contactkit(&["verify", "--checks", "liouville,liouvile"], &dir);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.exists());

    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"model": {"kind": "flat", "n": 1}, "sampels": 3}"#).unwrap();
    let o = contactkit(&["verify", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.exists());

    let o = contactkit(&["invariant", "--n", "0"], &dir);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn invariant_writes_windings_and_loop_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("inv");
    let o = contactkit(&["invariant", "--model", "flat", "--n", "1", "--k", "1,2,3,4", "--plot"], &dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for k in 1..=4 {
        let w: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("winding_k{k}.json"))).unwrap()).unwrap();
        assert_eq!(w["winding"], k);
        let csv = std::fs::read_to_string(dir.join(format!("loop_k{k}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("theta,re_det,im_det,re_00,im_00"));
        assert!(lines.count() >= 64);
        assert!(dir.join(format!("loop_k{k}.svg")).exists());
    }
    let r = report(&dir);
    let windings: Vec<i64> = r["iterates"].as_array().unwrap().iter().map(|i| i["winding"]["winding"].as_i64().unwrap()).collect();
    assert_eq!(windings, [1, 2, 3, 4]);
}

#[test]
fn invariant_on_higher_dimension_and_torus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("flat2");
    let o = contactkit(&["invariant", "--n", "2", "--k", "0"], &dir);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&dir)["iterates"][0]["winding"]["winding"], 0);
    assert!(!dir.join("loop_k0.svg").exists());

    let dir = tmp.path().join("torus");
    let o = contactkit(&["invariant", "--model", "torus", "--k", "1"], &dir);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&dir)["iterates"][0]["winding"]["winding"], 1);
}

#[test]
fn double_equivalence_passes_for_both_sources() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("shifted");
    let o = contactkit(&["double-equiv", "--samples", "30"], &dir);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));

    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"f0": "cutoff", "samples": 20}"#).unwrap();
    let dir = tmp.path().join("cutoff");
    let o = contactkit(&["double-equiv", "--config", cfg.to_str().unwrap()], &dir);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&dir);
    assert_eq!(r["config"]["f0"], "cutoff");
    for c in r["checks"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let args = ["verify", "--samples", "40", "--seed", "9", "--jobs", "2"];
    assert_eq!(contactkit(&args, &a).status.code(), Some(0));
    let args = ["verify", "--samples", "40", "--seed", "9", "--jobs", "1"];
    assert_eq!(contactkit(&args, &b).status.code(), Some(0));
    assert_eq!(without_timing(report(&a)), without_timing(report(&b)));

    let args = ["invariant", "--k", "2"];
    assert_eq!(contactkit(&args, &a).status.code(), Some(0));
    assert_eq!(contactkit(&args, &b).status.code(), Some(0));
    assert_eq!(without_timing(report(&a)), without_timing(report(&b)));
    assert_eq!(std::fs::read(a.join("loop_k2.csv")).unwrap(), std::fs::read(b.join("loop_k2.csv")).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_contactkit"))
        .args(["verify", "--checks", "liouville", "--samples", "5", "--out"])
        .arg(&dir)
        .env("CONTACTKIT_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&dir)["config"]["seed"], 77);

    let o = Command::new(env!("CARGO_BIN_EXE_contactkit"))
        .args(["verify", "--checks", "liouville", "--samples", "5", "--seed", "3", "--out"])
        .arg(&dir)
        .env("CONTACTKIT_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&dir)["config"]["seed"], 3);
}

#[test]
fn failing_check_exits_one() {
    // An identity threshold below round-off.
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fail");
    let o = contactkit(&["verify", "--checks", "lie-derivative", "--tol-identity", "1e-40"], &dir);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(report(&dir)["all_pass"], false);
}
