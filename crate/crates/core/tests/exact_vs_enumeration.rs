//! Closed forms against a direct enumeration written here, independent of
//! the library oracle.

use modsetlab::exact;
use modsetlab::graph::{self, GraphKind};
use modsetlab::oracle::{self, Event};
use modsetlab::{BigRational, ResidueSet};
use num_traits::{One, Zero};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// `sum over masks` of `p^|A| (1-p)^(n-|A|)` for masks satisfying `pred`.
fn brute(n: usize, p: &BigRational, pred: impl Fn(&[bool]) -> bool) -> BigRational {
    let one_minus = BigRational::one() - p;
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << n) {
        let member: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        if pred(&member) {
            let k = mask.count_ones() as usize;
            total += num_traits::pow(p.clone(), k) * num_traits::pow(one_minus.clone(), n - k);
        }
    }
    total
}

fn diff_missing(n: usize, k: usize, m: &[bool]) -> bool {
    (0..n).all(|a| !(m[a] && m[(a + k) % n]))
}

fn sum_missing(n: usize, s: usize, m: &[bool]) -> bool {
    (0..n).all(|a| !(m[a] && m[(s + n - a) % n]))
}

const PROBS: [(i64, i64); 4] = [(1, 4), (1, 2), (3, 4), (2, 7)];

#[test]
fn diff_missing_prime() {
    for n in [2usize, 3, 5, 7, 11, 13] {
        for (a, b) in PROBS {
            let p = q(a, b);
            let closed = exact::prob_diff_missing(n as u64, &p).unwrap();
            let empty = num_traits::pow(BigRational::one() - &p, n);
            for k in 1..n {
                let all = brute(n, &p, |m| diff_missing(n, k, m));
                assert_eq!(all, &closed + &empty, "n={n} k={k} p={p}");
            }
        }
    }
}

#[test]
fn both_sums_missing_prime() {
    for n in [3usize, 5, 7, 11] {
        for (a, b) in PROBS {
            let p = q(a, b);
            let closed = exact::prob_both_sums_missing(n as u64, &p).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    let e = brute(n, &p, |m| sum_missing(n, i, m) && sum_missing(n, j, m));
                    assert_eq!(e, closed, "n={n} ({i},{j}) p={p}");
                }
            }
        }
    }
}

#[test]
fn expected_missing_sums_odd() {
    for n in [3usize, 5, 7, 9, 11] {
        for (a, b) in PROBS {
            let p = q(a, b);
            let per_residue: BigRational = (0..n)
                .map(|s| brute(n, &p, |m| sum_missing(n, s, m)))
                .fold(BigRational::zero(), |acc, x| acc + x);
            assert_eq!(
                exact::exact_expected_missing_sums(n as u64, &p).unwrap(),
                per_residue,
                "n={n} p={p}"
            );
            // The two-element form overshoots by exactly 1 + p.
            assert_eq!(
                exact::expected_missing_sums(n as u64, &p).unwrap(),
                per_residue * (BigRational::one() + &p)
            );
        }
    }
}

#[test]
fn composite_difference_probability_is_reported_not_equal() {
    // The per-cycle product conditions each cycle on meeting A, so it
    // differs from the unconditional probability.
    let p = q(1, 2);
    let closed = exact::prob_diff_missing_composite(6, 2, &p).unwrap();
    assert_eq!(closed, q(9, 64));
    // Two triangles, each independent with probability 1/2.
    let all = brute(6, &p, |m| diff_missing(6, 2, m));
    assert_eq!(all, q(1, 4));
    // Three doubled edges, each independent with probability 3/4.
    let three = brute(6, &p, |m| diff_missing(6, 3, m));
    assert_eq!(three, q(27, 64));
    assert_eq!(
        exact::prob_diff_missing_composite(6, 3, &p).unwrap(),
        q(1, 8)
    );
}

#[test]
fn library_oracle_agrees_with_local_enumeration() {
    for n in 1usize..=12 {
        let p = q(1, 3);
        for k in 1..n {
            let lib =
                oracle::oracle_event_probability(n, &p, &Event::DiffMissing(k), true).unwrap();
            assert_eq!(lib, brute(n, &p, |m| diff_missing(n, k, m)));
        }
        for s in 0..n {
            let lib = oracle::oracle_event_probability(n, &p, &Event::SumMissing(s), true).unwrap();
            assert_eq!(lib, brute(n, &p, |m| sum_missing(n, s, m)));
        }
    }
}

#[test]
fn independence_events_match_membership_events() {
    for n in 3usize..=12 {
        for mask in 0u64..(1 << n) {
            let a = ResidueSet::from_mask(n, mask).unwrap();
            let sums = modsetlab::sets::sumset(&a);
            let diffs = modsetlab::sets::difference_set(&a);
            for k in 1..n {
                let g = graph::build_diff_graph(n, k).unwrap();
                assert_eq!(
                    graph::independence_event_holds(&a, &g).unwrap(),
                    !diffs.contains(k)
                );
            }
            for (i, j) in [(0, 1), (1, n - 1), (2, n / 2)] {
                if i == j {
                    continue;
                }
                let g = graph::build_sum_graph(n, i, j).unwrap();
                let both = !sums.contains(i) && !sums.contains(j);
                assert_eq!(graph::independence_event_holds(&a, &g).unwrap(), both);
            }
        }
    }
}

#[test]
fn oracle_moments_against_local_enumeration() {
    let p = q(1, 2);
    let m = oracle::oracle_moments(7, &p, true).unwrap();
    assert_eq!(m.e_sc, q(189, 128));
    let e_dc: BigRational = (0..7)
        .map(|k| {
            brute(7, &p, |mm| {
                if k == 0 {
                    mm.iter().all(|x| !x)
                } else {
                    diff_missing(7, k, mm)
                }
            })
        })
        .fold(BigRational::zero(), |acc, x| acc + x);
    assert_eq!(m.e_dc, e_dc);
    let nonempty = oracle::oracle_moments(7, &p, false).unwrap();
    let closed = exact::expected_missing_diffs(7, &p).unwrap();
    // Without the empty set, 0 is never missing.
    assert_eq!(nonempty.e_dc, closed.value);
    assert!(closed.value <= closed.bound);
}

#[test]
fn composite_sum_graph_is_not_a_path() {
    let g = graph::build_sum_graph(9, 0, 3).unwrap();
    assert_eq!(graph::classify(&g), GraphKind::Other);
}
