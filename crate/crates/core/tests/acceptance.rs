//! Acceptance suite: runs every verification criterion at its pinned
//! tolerance and prints one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::PathBuf;

use sumopt_core::verify::{run_suite, DEFAULT_SEED};

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("sumopt-acceptance-{}-{}", name, std::process::id()))
}

fn check(name: &'static str) {
    let reports = run_suite(Some(name), DEFAULT_SEED, &scratch(name)).expect("suite runs");
    assert_eq!(reports.len(), 1);
    let report = &reports[0];
    println!("{}", report.line());
    assert!(report.pass, "{}", report.line());
}

#[test]
fn criterion_01_reduction_equivalence() {
    check("reduction");
}

#[test]
fn criterion_02_lemma1_identities() {
    check("lemma1");
}

#[test]
fn criterion_03_lemma2_inequalities() {
    check("lemma2");
}

#[test]
fn criterion_04_rate_exponents() {
    check("rate");
}

#[test]
fn criterion_05_lemma3_momentum_decay() {
    check("lemma3");
}

#[test]
fn criterion_06_theorem1_plateau() {
    check("theorem1");
}

#[test]
fn criterion_07_adam_bounded_descent() {
    check("adam");
}

#[test]
fn criterion_08_oracle_certification() {
    check("oracle");
}

#[test]
fn criterion_09_holder_recovery() {
    check("holder");
}

#[test]
fn criterion_10_artifact_determinism() {
    check("determinism");
}

#[test]
fn unknown_criterion_name_is_rejected() {
    assert!(run_suite(Some("nonsense"), DEFAULT_SEED, &scratch("x")).is_err());
}
