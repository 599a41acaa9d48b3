//! Acceptance suite: every release criterion as one test, printing a
//! machine-readable pass/fail line. Run with `--nocapture` to see the lines
//! for passing criteria too.

use conespec::verify;

fn run(id: &str) {
    let reports = verify::run_all(id);
    assert_eq!(
        reports.len(),
        1,
        "criterion filter `{id}` selected {}",
        reports.len()
    );
    let r = &reports[0];
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!(
        "{status} {} {} ({:.2}s): {}",
        r.id, r.name, r.seconds, r.details
    );
    assert!(r.passed, "{} {}: {}", r.id, r.name, r.details);
}

#[test]
fn criterion_01_a_spectrum_example_and_symmetry() {
    run("c1");
}

#[test]
fn criterion_02_dual_solver_agreement() {
    run("c2");
}

#[test]
fn criterion_03_analytic_eigenvalues() {
    run("c3");
}

#[test]
fn criterion_04_limit_w_mechanism() {
    run("c4");
}

#[test]
fn criterion_05_zero_multiplicity_count() {
    run("c5");
}

#[test]
fn criterion_06_pseudomode_inverse_log_rate() {
    run("c6");
}

#[test]
fn criterion_07_trace_decay_laws() {
    run("c7");
}

#[test]
fn criterion_08_hardy_inequality_suite() {
    run("c8");
}

#[test]
fn criterion_09_topology_predictions() {
    run("c9");
}

#[test]
fn criterion_10_determinism_and_roundtrip() {
    run("c10");
}
