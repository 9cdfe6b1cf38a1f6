use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncpath"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn base_config() -> Value {
    json!({
        "dim": 2, "hbar": 1.0, "mass": 1.0,
        "theta": [[0.0, 0.1], [-0.1, 0.0]],
        "grid": {"points_per_axis": 8, "box_half_width": 4.0},
        "potential": {"form": "harmonic", "coefficients": {"omega": 1.0}},
        "time": {"total": 0.5, "slices": 4, "alpha": 0.0}
    })
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

#[test]
fn phi_audit_passes() {
    let out = run(&["phi-audit", "--m", "3", "--alphas=-0.5,0,0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("identity,alpha,pass,detail\n"));
    assert!(!text.contains(",FAIL,"));
    assert!(text.contains("alpha-cancellation"));
}

#[test]
fn missing_theta_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v.as_object_mut().unwrap().remove("theta");
    let p = write_config(dir.path(), "c.json", &v);
    let out = run(&["-c", p.to_str().unwrap(), "symbol"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn symmetric_theta_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", &base_config());
    let out = run(&["-c", p.to_str().unwrap(), "--set", "theta=[[0,0.1],[0.1,0]]", "star-check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(run(&["no-such-thing"]).status.code(), Some(2));
}

#[test]
fn missing_config_exits_2() {
    let out = run(&["kernel"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", &base_config());
    let c = p.to_str().unwrap();
    for args in [
        vec!["-c", c, "kernel"],
        vec!["-c", c, "symbol"],
        vec!["-c", c, "oracle-compare", "--m-list", "4,8", "--omit-runtime"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn free_alpha_sweep_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v["potential"] = json!({"form": "zero"});
    let p = write_config(dir.path(), "c.json", &v);
    let out = run(&["-c", p.to_str().unwrap(), "alpha-sweep", "--m-list", "2,4,8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let spreads: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("slope") && !l.starts_with("residual"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(spreads.len(), 3);
    assert!(spreads.iter().all(|&s| s == 0.0));
}

#[test]
fn overrides_and_flags_take_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", &base_config());
    let c = p.to_str().unwrap();
    let out = run(&["-c", c, "--set", "time.slices=6", "--set", "time.alpha=0.25", "kernel"]);
    let head = String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string();
    assert!(head.contains(" m=6 "), "{head}");
    assert!(head.contains("alpha=2.5"), "{head}");
    let out = run(&["-c", c, "--set", "time.slices=6", "kernel", "--m", "3"]);
    let head = String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string();
    assert!(head.contains(" m=3 "), "{head}");
}

#[test]
fn summary_records_config_hash_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.json", &base_config());
    let s = dir.path().join("s.json");
    let csv = dir.path().join("out.csv");
    let out = run(&[
        "-c",
        p.to_str().unwrap(),
        "--summary",
        s.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
        "unitarity",
        "--m-list",
        "2,4",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&s).unwrap()).unwrap();
    assert_eq!(doc["subcommand"], "unitarity");
    assert_eq!(doc["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("m,norm_ratio\n"));
}

#[test]
fn limit_table_is_exact() {
    let out = run(&["limit-324", "--m-list", "2,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\n2,2/3,1/3,"));
    assert!(text.contains("\n10,10/11,1/11,"));
}
