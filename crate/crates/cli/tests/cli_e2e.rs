use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn posperturb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posperturb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn only_file(dir: &Path, ext: &str) -> std::path::PathBuf {
    let mut found: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    assert_eq!(found.len(), 1, "{found:?}");
    found.pop().unwrap()
}

fn read_json(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(only_file(dir, "json")).unwrap()).unwrap()
}

#[test]
fn constructed_true_instance_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = posperturb(&["--scenario", "metzler-random", "--seed", "1", "--out", out]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = read_json(dir.path());
    assert_eq!(r["status"], "pass");
    assert_eq!(r["scenario"]["kind"]["constructed_true"], true);
    for s in r["statements"].as_array().unwrap() {
        assert_eq!(s["verdict"], "pass");
    }
}

#[test]
fn constructed_false_instance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = posperturb(&["--scenario", "metzler-random", "--seed", "0", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let r = read_json(dir.path());
    assert_eq!(r["status"], "fail");
    assert_eq!(r["scenario"]["kind"]["constructed_true"], false);
}

#[test]
fn usage_errors_exit_64() {
    let o = posperturb(&["--config", "/nonexistent/run.json"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(
        posperturb(&["--scenario", "no-such-builder"]).status.code(),
        Some(64)
    );
    assert_eq!(posperturb(&[]).status.code(), Some(64));
    assert_eq!(posperturb(&["--json"]).status.code(), Some(64));
    assert_eq!(
        posperturb(&["--scenario", "delay", "--tol", "-1"])
            .status
            .code(),
        Some(64)
    );
}

#[test]
fn unwritable_output_exits_74() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = posperturb(&["--scenario", "delay", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(74));
}

#[test]
fn hypothesis_and_precision_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{
            "scenario": {"kind": "metzler-random", "seed": 1},
            "checks": ["corollary"],
            "corollary": {"m": 1.0, "omega": -10.0, "c3": 1.0},
            "output_dir": "OUT"
        }"#
        .replace("OUT", dir.path().join("a").to_str().unwrap()),
    )
    .unwrap();
    let o = posperturb(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let r = read_json(&dir.path().join("a"));
    assert_eq!(r["status"], "error");
    assert!(r["errors"][0].as_str().unwrap().contains("hypothesis"));

    let b = dir.path().join("b");
    let o = posperturb(&[
        "--scenario",
        "heat-drift",
        "--tol",
        "1e-13",
        "--format",
        "json",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(read_json(&b)["errors"][0]
        .as_str()
        .unwrap()
        .contains("quadrature error"));
}

#[test]
fn reports_are_loss_free_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = posperturb(&["--scenario", "delay", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(dir.path());
    let csv = std::fs::read_to_string(only_file(dir.path(), "csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("statement,t_or_lambda,x_index,vprime_index,slack,verdict")
    );
    let mut total = 0;
    for s in r["statements"].as_array().unwrap() {
        let entries = s["entries"].as_array().unwrap();
        assert_eq!(
            entries.len() as u64,
            s["samples_evaluated"].as_u64().unwrap()
        );
        total += entries.len();
        let min = entries
            .iter()
            .map(|e| e["slack"].as_f64().unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, s["min_slack"].as_f64().unwrap());
    }
    assert_eq!(lines.count(), total);
    let strong = r["statements"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["statement"] == "strong");
    assert!(strong);
    assert!(r["voc"]["passed"].as_bool().unwrap());
}

#[test]
fn format_flag_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = posperturb(&["--scenario", "rank-one-lp", "--format", "csv", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(names.len(), 1);
    assert!(names[0].extension().is_some_and(|e| e == "csv"));
}

#[test]
fn listing_is_stable_and_machine_readable() {
    let a = posperturb(&["--list"]);
    let b = posperturb(&["--list"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for name in [
        "metzler-random",
        "heat-drift",
        "rank-one-linfty",
        "rank-one-lp",
        "delay",
    ] {
        assert!(text.contains(name));
    }
    let j = posperturb(&["--list", "--json"]);
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn grid_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = posperturb(&[
        "--scenario",
        "rank-one-linfty",
        "--tmax",
        "4",
        "--lambda-max",
        "20",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(dir.path());
    let t: Vec<f64> = serde_json::from_value(r["grids"]["t"].clone()).unwrap();
    assert_eq!(t, vec![0.2, 1.0, 2.0, 4.0]);
    let omega = r["scenario"]["omega"].as_f64().unwrap();
    let l: Vec<f64> = serde_json::from_value(r["grids"]["lambda"].clone()).unwrap();
    assert_eq!(l, [2.0, 4.0, 10.0, 20.0].map(|d| omega + d).to_vec());
}
