//! The acceptance gate: one test per demonstration fixture, each printing a
//! single pass/fail line. `signed-moments demo` renders the same outcomes
//! as a table, from the same code.
//!
//! Run with `--nocapture` to see the lines for passing criteria too.

use signed_moments::fixtures::{run_fixture, DEFAULT_SEED, FIXTURE_NAMES};

fn check(name: &str) {
    let out = run_fixture(name, DEFAULT_SEED).expect("fixture exists");
    let tag = if out.passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {}: {}", out.name, out.details);
    assert!(out.passed, "{}: {}", out.name, out.details);
}

#[test]
fn criterion_1_one_variable_interpolation_is_exact() {
    check("polya");
}

#[test]
fn criterion_2_grid_rank_and_residuals() {
    check("grid");
}

#[test]
fn criterion_3_strip_is_refused_with_flat_growth() {
    check("strip");
}

#[test]
fn criterion_4_vanishing_certificate_on_the_cross() {
    check("density");
}

#[test]
fn criterion_5_growth_space_dimension_law() {
    check("growth-law");
}

#[test]
fn criterion_6_truth_table_across_the_catalog() {
    check("truth-table");
}

#[test]
fn criterion_7_variation_minimisation() {
    check("min-tv");
}

#[test]
fn criterion_8_round_trip_reconstruction() {
    check("round-trip");
}

#[test]
fn every_fixture_is_covered_by_a_criterion() {
    // Keep this file honest: one criterion test per listed fixture.
    assert_eq!(FIXTURE_NAMES.len(), 8);
}
