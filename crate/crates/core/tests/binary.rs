use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_channelflow"));
    c.env("CHANNELFLOW_THREADS", "1");
    c
}

#[test]
fn run_verb_succeeds_on_minimal_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("shear.cfg");
    fs::write(&cfg, "nu = 1\ndt = 1e-3\nnx = 8\nny = 8\nnz = 5\nt_end = 0.01\ninit = shear\n").unwrap();
    let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let status = bin().args(["report", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn invalid_config_names_the_key_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "nu = 1\ndt = 1e-3\nnx = 8\nny = 8\nnz = 5\nalpha = 3\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn verify_inequalities_and_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify-inequalities", "--seed", "5", "--grid", "8", "8", "5", "--count", "2", "--out"];
    let ok = bin().args(args).arg(dir.path()).status().unwrap();
    assert_eq!(ok.code(), Some(0));
    let control = bin().args(args).arg(dir.path()).arg("--negative-control").status().unwrap();
    assert_eq!(control.code(), Some(3));
}

#[test]
fn convergence_on_roundoff_exact_scheme_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "nu = 1\ndt = 1e-3\nnx = 8\nny = 8\nnz = 5\nt_end = 0.02\ninit = shear\n").unwrap();
    let out = bin().args(["convergence", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Inconclusive"));
    fs::write(&cfg, "nu = 1\ndt = 1e-3\nnx = 8\nny = 8\nnz = 5\nt_end = 0.02\ninit = shear\nscheme = cnab2\n").unwrap();
    let out = bin().args(["convergence", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bad_arguments_exit_one() {
    let status = bin().args(["verify-inequalities", "--grid", "8", "8"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}
