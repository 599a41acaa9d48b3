//! Every shipped config parses and runs; artifacts are byte-deterministic;
//! input errors exit with status 1.

use std::path::{Path, PathBuf};
use std::process::Command;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn run_conespec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_conespec"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("binary failed to launch")
}

#[test]
fn every_shipped_config_runs_clean() {
    let dir = repo_root().join("configs");
    let mut found = 0usize;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map(|e| e == "cfg").unwrap_or(false) {
            found += 1;
            let out = run_conespec(&[path.to_str().unwrap()]);
            assert!(
                out.status.success(),
                "{}: exit {:?}\nstdout: {}\nstderr: {}",
                path.display(),
                out.status.code(),
                String::from_utf8_lossy(&out.stdout),
                String::from_utf8_lossy(&out.stderr)
            );
        }
    }
    assert!(found >= 7, "expected the shipped configs, found {found}");
}

#[test]
fn sweep_artifacts_are_byte_deterministic() {
    let cfg = repo_root().join("configs/gamma0_neumann.cfg");
    let out_a = std::env::temp_dir().join("conespec_det_a");
    let out_b = std::env::temp_dir().join("conespec_det_b");
    for out in [&out_a, &out_b] {
        let res = run_conespec(&["--out-dir", out.to_str().unwrap(), cfg.to_str().unwrap()]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    for name in ["sweep.csv", "fits.json", "sweep_1.dat"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    // the fit summary records the first-order error law of this geometry
    let fits = std::fs::read_to_string(out_a.join("fits.json")).unwrap();
    assert!(fits.contains("\"family\":\"power\""), "{fits}");
}

#[test]
fn a_spectrum_example_table_via_cli() {
    let cfg = repo_root().join("configs/s2_cross_section.cfg");
    let out = run_conespec(&["--cmd", "a-spectrum", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for needle in ["-2.0", "-1.0     5", "1.0     5", "2.0     3"] {
        assert!(stdout.contains(needle), "missing `{needle}` in:\n{stdout}");
    }
    // the file-sourced variant produces the same table
    let cfg2 = repo_root().join("configs/s2_from_file.cfg");
    let out2 = run_conespec(&[cfg2.to_str().unwrap()]);
    assert!(out2.status.success());
}

#[test]
fn zero_mult_config_reports_four() {
    let cfg = repo_root().join("configs/zero_mult.cfg");
    let out = run_conespec(&[cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("zero multiplicity = 4"), "stdout: {stdout}");
}

#[test]
fn missing_section_exits_one_with_named_section() {
    let bad = std::env::temp_dir().join("conespec_missing_geometry.cfg");
    std::fs::write(
        &bad,
        "[run]\ncmd = sweep\n[sweep]\neps = 0.1 0.01\ncount = 2\n",
    )
    .unwrap();
    let out = run_conespec(&[bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("geometry"), "stderr: {stderr}");
}

#[test]
fn schema_violation_reports_line_number() {
    let bad = std::env::temp_dir().join("conespec_bad_key.cfg");
    std::fs::write(&bad, "[run]\ncmd = sweep\nturbo = yes\n").unwrap();
    let out = run_conespec(&[bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line 3") && stderr.contains("turbo"),
        "stderr: {stderr}"
    );
}

#[test]
fn verify_only_filter_runs_single_criterion() {
    let out = run_conespec(&["--cmd", "verify", "--only", "c9"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS c9"), "stdout: {stdout}");
    assert!(!stdout.contains("c2"), "filter leaked: {stdout}");
    // name substrings select too
    let out = run_conespec(&["--cmd", "verify", "--only", "zero-multiplicity"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS c5"));
}
