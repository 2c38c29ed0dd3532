//! Shared fixtures for the benchmarks.

use modsetlab::{Probability, ResidueSet, SampleSpec};

/// A seeded random subset of `Z/nZ` with density `p`.
pub fn fixture(n: usize, p: f64, seed: u64) -> ResidueSet {
    let spec = SampleSpec {
        n,
        p: Probability::from_f64_dyadic(p).expect("valid density"),
        base_seed: seed,
        trial_index: 0,
    };
    modsetlab::sets::sample_subset(&spec).expect("valid spec")
}
