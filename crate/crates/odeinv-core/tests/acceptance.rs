//! Acceptance suite: one test per criterion, printing a pass/fail line per
//! check (run with `--nocapture` to see them all).

use odeinv_core::convention::Convention;
use odeinv_core::selftest::{self, CriterionResult};

const SEED: u64 = 0x0de1_11f0;

fn report(r: &CriterionResult) {
    let verdict = if r.passed { "PASS" } else { "FAIL" };
    println!("[{verdict}] criterion {}: {}", r.id, r.name);
    for d in &r.details {
        println!("    {d}");
    }
    assert!(r.passed, "criterion {} failed: {:?}", r.id, r.details);
}

#[test]
fn criterion_1_cohomology_dimension_suite() {
    report(&selftest::criterion_1_cohomology_dims());
}

#[test]
fn criterion_2_structural_suite() {
    report(&selftest::criterion_2_structural());
}

#[test]
fn criterion_3_oracle_equality_suite() {
    report(&selftest::criterion_3_oracles(SEED, &Convention::default()));
}

#[test]
fn criterion_4_invariance_vanishing_suite() {
    report(&selftest::criterion_4_invariance(&Convention::default()));
}

#[test]
fn criterion_5_detection_suite() {
    report(&selftest::criterion_5_detection(&Convention::default()));
}

#[test]
fn criterion_6_theta_expansion_suite() {
    report(&selftest::criterion_6_theta_expansion(SEED));
}

#[test]
fn criterion_7_diagram_suite() {
    report(&selftest::criterion_7_diagram());
}

#[test]
fn criterion_8_rho_cancellation_suite() {
    report(&selftest::criterion_8_rho_cancellation(SEED, &Convention::default()));
}
