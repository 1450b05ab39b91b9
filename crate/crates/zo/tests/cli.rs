//! Integration tests for the `zo` binary: exit codes, CSV artifacts and
//! rerun determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zo"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn zo")
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_passes_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{"mc_scale": 0.02, "checks": ["sandwich", "negative"], "seed": 3}"#,
    );
    let out = zo(
        &["verify", "--config", &cfg, "--out", "results"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = fs::read_to_string(tmp.path().join("results/report.csv")).unwrap();
    assert!(report.starts_with("name,negative_control,pass,"));
    assert!(report.lines().count() > 1);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("checks ok"));
}

#[test]
fn verify_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{"mc_scale": 0.02, "checks": ["variance"], "seed": 5}"#,
    );
    zo(&["verify", "--config", &cfg, "--out", "a"], tmp.path());
    zo(&["verify", "--config", &cfg, "--out", "b"], tmp.path());
    let a = fs::read(tmp.path().join("a/report.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/report.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bad_config_value_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{"epsilon": -0.5}"#);
    let out = zo(&["run", "--config", &cfg, "--out", "r"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("epsilon"), "{stderr}");
}

#[test]
fn unknown_config_key_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{"stepsize": 0.1}"#);
    let out = zo(&["sweep", "--config", &cfg, "--out", "r"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn missing_config_file_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zo(
        &["run", "--config", "no-such-file.json", "--out", "r"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn run_writes_trace_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{"problem": "nonsmooth_norm", "d": 3, "iters": 200, "seed": 11}"#,
    );
    let out = zo(&["run", "--config", &cfg, "--out", "a"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    zo(&["run", "--config", &cfg, "--out", "b"], tmp.path());
    let a = fs::read(tmp.path().join("a/trace.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/trace.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("iter,gap,calls\n"));
    assert_eq!(text.trim_end().lines().count(), 202); // header + N+1 rows
}

#[test]
fn sweep_writes_rows_and_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{"d": 3, "iters": 100, "repeats": 2, "delta_multipliers": [0.0, 10.0], "seed": 4}"#,
    );
    let out = zo(&["sweep", "--config", &cfg, "--out", "a"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    zo(&["sweep", "--config", &cfg, "--out", "b"], tmp.path());
    let a = fs::read(tmp.path().join("a/sweep.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/sweep.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("run_id,scheme,d,epsilon,gamma,delta,final_gap,oracle_calls\n"));
    assert_eq!(text.trim_end().lines().count(), 5); // header + 2 multipliers x 2 seeds
}

#[test]
fn plot_renders_trace_and_sweep_svgs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{"d": 3, "iters": 50, "repeats": 2, "delta_multipliers": [0.0, 1.0], "seed": 4}"#,
    );
    zo(&["run", "--config", &cfg, "--out", "r"], tmp.path());
    zo(&["sweep", "--config", &cfg, "--out", "r"], tmp.path());
    for name in ["trace", "sweep"] {
        let csv = format!("r/{name}.csv");
        let svg = format!("r/{name}.svg");
        let out = zo(&["plot", &csv, "--out", &svg], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        let body = fs::read_to_string(tmp.path().join(&svg)).unwrap();
        assert!(body.starts_with("<svg"), "{name}");
    }
}

#[test]
fn plot_malformed_csv_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write_cfg(tmp.path(), "bad.csv", "iter,gap,calls\n0,notanumber,0\n");
    let out = zo(&["plot", &csv, "--out", "x.svg"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn constants_prints_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zo(
        &[
            "constants",
            "--scheme",
            "L2",
            "--d",
            "4",
            "--epsilon",
            "0.1",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("kappa"));
    assert!(stdout.contains("delta_max"));
    // gamma = eps / (2 M2) = 0.05
    assert!(stdout.contains("5.000000000000e-2"), "{stdout}");
}

#[test]
fn constants_bad_scheme_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = zo(&["constants", "--scheme", "L3", "--d", "4"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
