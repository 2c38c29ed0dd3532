use std::collections::BTreeSet;

use modsetlab::multiplicity::{self, Side};
use modsetlab::sets::{self, Kernel};
use modsetlab::{Probability, ResidueSet, SampleSpec};
use proptest::prelude::*;

fn naive(n: usize, a: &[usize], sign: bool) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in a {
            out.insert(if sign { (x + y) % n } else { (x + n - y) % n });
        }
    }
    out
}

fn arb_set() -> impl Strategy<Value = ResidueSet> {
    (1usize..=512, 0.0f64..1.0, any::<u64>()).prop_map(|(n, density, seed)| {
        let p = Probability::from_f64_dyadic(density * density).unwrap();
        sets::sample_subset(&SampleSpec {
            n,
            p,
            base_seed: seed,
            trial_index: 0,
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernels_agree_with_naive(a in arb_set()) {
        let n = a.modulus();
        let members = a.members();
        let sums: Vec<usize> = naive(n, &members, true).into_iter().collect();
        let diffs: Vec<usize> = naive(n, &members, false).into_iter().collect();
        for kernel in [Kernel::Dense, Kernel::Sparse, Kernel::Auto] {
            prop_assert_eq!(sets::sumset_with(&a, kernel).members(), sums.clone());
            prop_assert_eq!(sets::difference_set_with(&a, kernel).members(), diffs.clone());
        }
    }

    #[test]
    fn size_bounds(a in arb_set()) {
        let k = a.len();
        let n = a.modulus();
        let s = sets::sumset(&a).len();
        let d = sets::difference_set(&a).len();
        prop_assert!(s <= (k * (k + 1) / 2).min(n));
        prop_assert!(d <= (k * k - k + 1).min(n) || k == 0);
        if k > 0 {
            prop_assert!(s >= k && d >= k);
            prop_assert!(d % 2 == 1 || n % 2 == 0);
        }
    }

    #[test]
    fn difference_set_is_symmetric(a in arb_set()) {
        let d = sets::difference_set(&a);
        prop_assert_eq!(d.negated(), d.clone());
        prop_assert_eq!(sets::difference_set(&a.negated()), d);
        prop_assert_eq!(sets::sumset(&a.negated()), sets::sumset(&a).negated());
    }

    #[test]
    fn inclusion_exclusion(a in arb_set()) {
        let profile = multiplicity::multiplicity_profile(&a);
        prop_assert_eq!(
            multiplicity::inclusion_exclusion_size(&profile, Side::Sum),
            sets::sumset(&a).len().into()
        );
        prop_assert_eq!(
            multiplicity::inclusion_exclusion_size(&profile, Side::Difference),
            sets::difference_set(&a).len().into()
        );
    }

    #[test]
    fn sampling_depends_only_on_seed_and_index(
        n in 1usize..2000, density in 0.0f64..1.0, seed in any::<u64>(), idx in 0u64..1000
    ) {
        let spec = SampleSpec {
            n,
            p: Probability::from_f64_dyadic(density).unwrap(),
            base_seed: seed,
            trial_index: idx,
        };
        let first = sets::sample_subset(&spec).unwrap();
        let _ = sets::sample_subset(&SampleSpec { trial_index: idx + 1, ..spec.clone() });
        prop_assert_eq!(sets::sample_subset(&spec).unwrap(), first);
    }
}

/// Plain per-residue Bernoulli draws with the same probability, as a
/// reference for the sampler's mean size.
#[test]
fn mean_cardinality_matches_reference_sampler() {
    use rand::{Rng, SeedableRng};
    let n = 10007usize;
    for density in [0.005, 0.3] {
        let p = Probability::from_f64_dyadic(density).unwrap();
        let trials = 200u64;
        let total: usize = (0..trials)
            .map(|t| {
                sets::sample_subset(&SampleSpec {
                    n,
                    p: p.clone(),
                    base_seed: 99,
                    trial_index: t,
                })
                .unwrap()
                .len()
            })
            .sum();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let reference: usize = (0..trials as usize * n)
            .filter(|_| rng.random::<f64>() < density)
            .count();
        let mean = total as f64 / trials as f64;
        let ref_mean = reference as f64 / trials as f64;
        let sd = (n as f64 * density * (1.0 - density) / trials as f64).sqrt();
        assert!((mean - ref_mean).abs() < 6.0 * sd, "{mean} vs {ref_mean}");
        assert!((mean - n as f64 * density).abs() < 4.0 * sd, "{mean}");
    }
}
