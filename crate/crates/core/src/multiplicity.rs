//! Representation counts and the repeated-sum / repeated-difference
//! statistics `X_k`, `Y_k`.
//!
//! Sum pairs are unordered with `a = b` allowed; difference pairs are ordered
//! with `(a, a)` allowed. With those conventions the alternating series
//! `sum_k (-1)^(k+1) X_k` is exactly `|A+A|` (and likewise for `Y_k`).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::binomial;
use crate::sets::ResidueSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityProfile {
    n: usize,
    m_sum: Vec<u64>,
    m_diff: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Sum,
    Difference,
}

impl MultiplicityProfile {
    pub fn modulus(&self) -> usize {
        self.n
    }

    /// `m_sum[r]`: unordered pairs `{a, b}` from `A` with `a + b ≡ r`.
    pub fn m_sum(&self) -> &[u64] {
        &self.m_sum
    }

    /// `m_diff[r]`: ordered pairs `(a, b)` from `A` with `a - b ≡ r`.
    pub fn m_diff(&self) -> &[u64] {
        &self.m_diff
    }

    fn counts(&self, side: Side) -> &[u64] {
        match side {
            Side::Sum => &self.m_sum,
            Side::Difference => &self.m_diff,
        }
    }

    /// Histogram multiplicity -> number of residues with it (zeros dropped).
    fn histogram(&self, side: Side) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for &m in self.counts(side).iter().filter(|&&m| m > 0) {
            *hist.entry(m).or_insert(0) += 1;
        }
        hist
    }
}

pub fn multiplicity_profile(a: &ResidueSet) -> MultiplicityProfile {
    let n = a.modulus();
    let members = a.members();
    let mut m_sum = vec![0u64; n];
    let mut m_diff = vec![0u64; n];
    if !members.is_empty() {
        m_diff[0] = members.len() as u64;
    }
    for (i, &x) in members.iter().enumerate() {
        let s = 2 * x;
        m_sum[if s >= n { s - n } else { s }] += 1;
        for &y in &members[i + 1..] {
            let s = x + y;
            m_sum[if s >= n { s - n } else { s }] += 1;
            let d = y - x;
            m_diff[d] += 1;
            m_diff[n - d] += 1;
        }
    }
    MultiplicityProfile { n, m_sum, m_diff }
}

fn sum_of_binomials(hist: &BTreeMap<u64, u64>, k: u64) -> BigUint {
    hist.iter()
        .filter(|(&m, _)| m >= k)
        .map(|(&m, &count)| binomial(m as i64, k as i64) * count)
        .sum()
}

/// `X_k = sum_r C(m_sum[r], k)`: unordered `k`-sets of sum pairs sharing a sum.
pub fn x_k(profile: &MultiplicityProfile, k: u64) -> BigUint {
    assert!(k >= 1, "k must be positive");
    sum_of_binomials(&profile.histogram(Side::Sum), k)
}

/// `Y_k = sum_r C(m_diff[r], k)`, including the difference `0`.
pub fn y_k(profile: &MultiplicityProfile, k: u64) -> BigUint {
    assert!(k >= 1, "k must be positive");
    sum_of_binomials(&profile.histogram(Side::Difference), k)
}

/// `Y_k` restricted to nonzero differences, i.e. without the
/// `C(|A|, k)` term contributed by the pairs `(a, a)`.
pub fn y_k_nonzero(profile: &MultiplicityProfile, k: u64) -> BigUint {
    let all = y_k(profile, k);
    let zero = binomial(profile.m_diff[0] as i64, k as i64);
    all - zero
}

/// `sum_{k>=1} (-1)^(k+1) X_k` (or `Y_k`), truncated after the largest
/// multiplicity since every later term is zero.
pub fn inclusion_exclusion_size(profile: &MultiplicityProfile, side: Side) -> BigInt {
    let hist = profile.histogram(side);
    let Some(&max) = hist.keys().next_back() else {
        return BigInt::zero();
    };
    let mut terms = vec![BigUint::zero(); max as usize + 1];
    for (&m, &count) in &hist {
        // C(m, k) built left to right: C(m, k) = C(m, k-1) (m - k + 1) / k.
        let mut c = BigUint::one();
        for k in 1..=m {
            c = c * (m - k + 1) / k;
            terms[k as usize] += &c * count;
        }
    }
    terms
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(k, t)| {
            let t = BigInt::from(t);
            if k % 2 == 1 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// Exact tuple counts `(xi_1k, xi_2k) = (n C(ceil(n/2), k), n C(ceil(n/2), k - 1))`.
pub fn xi_counts(n: u64, k: u64) -> (BigUint, BigUint) {
    assert!(k >= 1, "k must be positive");
    let reps = n.div_ceil(2) as i64;
    let n = BigUint::from(n);
    (
        &n * binomial(reps, k as i64),
        &n * binomial(reps, k as i64 - 1),
    )
}

/// `xi_1k p^(2k) + xi_2k p^(2k-1)`, the first-order accounting of `E[X_k]`.
pub fn expected_x_k(n: u64, p: &BigRational, k: u64) -> BigRational {
    let (xi1, xi2) = xi_counts(n, k);
    let pow = |e: u64| num_traits::pow(p.clone(), e as usize);
    BigRational::from_integer(xi1.into()) * pow(2 * k)
        + BigRational::from_integer(xi2.into()) * pow(2 * k - 1)
}

fn factorial(k: u64) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `n^(k+1)/k! (p^2/2)^k`.
pub fn asymptotic_x_k(n: f64, p: f64, k: u64) -> f64 {
    n * (n * p * p / 2.0).powi(k as i32) / factorial(k)
}

/// `n^(k+1)/k! (p^2)^k`.
pub fn asymptotic_y_k(n: f64, p: f64, k: u64) -> f64 {
    n * (n * p * p).powi(k as i32) / factorial(k)
}

/// Converts an exact count to `u128`, saturating (used only for reporting).
pub fn saturating_u128(v: &BigUint) -> u128 {
    v.to_u128().unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{difference_set, sumset};

    fn set(n: usize, m: &[usize]) -> ResidueSet {
        ResidueSet::from_members(n, m.iter().copied()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn full_z7_has_four_representations_everywhere() {
        let prof = multiplicity_profile(&ResidueSet::full(7).unwrap());
        assert_eq!(prof.m_sum(), &[4; 7]);
        assert_eq!(x_k(&prof, 2), big(42));
        assert_eq!(x_k(&prof, 1), big(28));
        assert_eq!(inclusion_exclusion_size(&prof, Side::Sum), BigInt::from(7));
    }

    #[test]
    fn residue_two_pairs_in_z7() {
        // {0,2}, {1,1}, {3,6}, {4,5}
        let full = ResidueSet::full(7).unwrap();
        let mut pairs = Vec::new();
        for a in full.iter() {
            for b in full.iter().filter(|&b| b >= a) {
                if (a + b) % 7 == 2 {
                    pairs.push((a, b));
                }
            }
        }
        assert_eq!(pairs, vec![(0, 2), (1, 1), (3, 6), (4, 5)]);
        assert_eq!(multiplicity_profile(&full).m_sum()[2], 4);
    }

    #[test]
    fn difference_profile_of_pair() {
        let prof = multiplicity_profile(&set(5, &[0, 1]));
        assert_eq!(prof.m_diff(), &[2, 1, 0, 0, 1]);
        assert_eq!(y_k(&prof, 2), big(1));
        assert_eq!(y_k(&prof, 1), big(4));
        assert_eq!(y_k_nonzero(&prof, 1), big(2));
    }

    #[test]
    fn empty_and_singleton() {
        let empty = multiplicity_profile(&ResidueSet::empty(5).unwrap());
        for k in 1..4 {
            assert!(y_k(&empty, k).is_zero());
            assert!(x_k(&empty, k).is_zero());
        }
        assert!(inclusion_exclusion_size(&empty, Side::Difference).is_zero());
        let single = multiplicity_profile(&set(7, &[0]));
        assert!(x_k(&single, 2).is_zero());
        assert_eq!(inclusion_exclusion_size(&single, Side::Sum), BigInt::one());
    }

    #[test]
    fn inclusion_exclusion_small_cases() {
        let a = set(5, &[1, 2]);
        let prof = multiplicity_profile(&a);
        assert_eq!(
            inclusion_exclusion_size(&prof, Side::Difference),
            BigInt::from(3)
        );
        assert_eq!(
            inclusion_exclusion_size(&prof, Side::Sum),
            BigInt::from(sumset(&a).len())
        );
        assert_eq!(difference_set(&a).len(), 3);
    }

    #[test]
    fn xi_counts_for_seven() {
        assert_eq!(xi_counts(7, 1), (big(28), big(7)));
        assert_eq!(xi_counts(7, 2), (big(42), big(28)));
        assert_eq!(xi_counts(7, 5), (big(0), big(7)));
    }

    #[test]
    fn expected_x_k_values() {
        let one = BigRational::one();
        assert_eq!(
            expected_x_k(7, &one, 1),
            BigRational::from_integer(35.into())
        );
        let zero = BigRational::zero();
        for k in 1..4 {
            assert!(expected_x_k(101, &zero, k).is_zero());
        }
        let n = 10007u64;
        let p = crate::Probability::from_f64_dyadic((n as f64).powf(-0.5)).unwrap();
        let e = crate::exact::rational_to_f64(&expected_x_k(n, p.exact(), 2));
        let target = n as f64 / 8.0;
        assert!((e / target - 1.0).abs() < 0.10, "{e} vs {target}");
    }
}
