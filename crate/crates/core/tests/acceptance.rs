//! One test per acceptance criterion. Each prints its verdict and the
//! individual checks; run with `--nocapture` to see them.

use modsetlab::acceptance::{self, CriterionFn};

fn run(f: CriterionFn) {
    let report = f().expect("criterion could not be evaluated");
    println!("{report}");
    let failures = report.failures();
    assert!(
        failures.is_empty(),
        "criterion {} failed: {:?}",
        report.id,
        failures.iter().map(|c| &c.label).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_01_critical_decay_limits() {
    run(acceptance::criterion_1);
}

#[test]
fn criterion_02_fast_decay_limits() {
    run(acceptance::criterion_2);
}

#[test]
fn criterion_03_slow_decay_full_sets() {
    run(acceptance::criterion_3);
}

#[test]
fn criterion_04_closed_forms_equal_enumeration() {
    run(acceptance::criterion_4);
}

#[test]
fn criterion_05_lucas_identity_and_counts() {
    run(acceptance::criterion_5);
}

#[test]
fn criterion_06_inclusion_exclusion() {
    run(acceptance::criterion_6);
}

#[test]
fn criterion_07_multiplicity_means() {
    run(acceptance::criterion_7);
}

#[test]
fn criterion_08_ladder_and_gauge_signs() {
    run(acceptance::criterion_8);
}

#[test]
fn criterion_09_graph_structure() {
    run(acceptance::criterion_9);
}

#[test]
fn criterion_10_dense_sets_balanced() {
    run(acceptance::criterion_10);
}
