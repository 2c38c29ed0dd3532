//! Exhaustive enumeration oracle: exact probabilities and moments obtained by
//! visiting all `2^n` subsets with weight `p^|A| (1-p)^(n-|A|)`.
//!
//! Subsets are counted per cardinality, then weighted once at the end, so the
//! parallel split over subset prefixes cannot affect the result. Set
//! arithmetic here works directly on `u32` masks and does not share code with
//! the kernels in [`crate::sets`].

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sets::ResidueSet;

/// Largest `n` accepted by [`oracle_event_probability`].
pub const PROBABILITY_LIMIT: usize = 22;
/// Largest `n` accepted by [`oracle_moments`].
pub const MOMENT_LIMIT: usize = 18;

type Predicate = Arc<dyn Fn(&ResidueSet) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Event {
    /// `k ∉ A - A`.
    DiffMissing(usize),
    /// `k ∉ A + A`.
    SumMissing(usize),
    /// `i ∉ A + A` and `j ∉ A + A`.
    BothSumsMissing(usize, usize),
    Custom(Predicate),
}

impl Event {
    pub fn custom(f: impl Fn(&ResidueSet) -> bool + Send + Sync + 'static) -> Self {
        Event::Custom(Arc::new(f))
    }
}

impl std::fmt::Debug for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Event::DiffMissing(k) => write!(f, "DiffMissing({k})"),
            Event::SumMissing(k) => write!(f, "SumMissing({k})"),
            Event::BothSumsMissing(i, j) => write!(f, "BothSumsMissing({i}, {j})"),
            Event::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

struct Masks {
    n: usize,
    full: u32,
}

impl Masks {
    fn new(n: usize) -> Self {
        Self {
            n,
            full: if n == 32 { u32::MAX } else { (1u32 << n) - 1 },
        }
    }

    /// Bit `b` moves to `b + s mod n`.
    fn rotate(&self, mask: u32, s: usize) -> u32 {
        let s = s % self.n;
        if s == 0 {
            return mask;
        }
        ((mask << s) | (mask >> (self.n - s))) & self.full
    }

    fn sum_missing(&self, mask: u32, k: usize) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let b = (k + self.n - a) % self.n;
            if mask >> b & 1 == 1 {
                return false;
            }
        }
        true
    }

    fn diff_missing(&self, mask: u32, k: usize) -> bool {
        mask & self.rotate(mask, k) == 0
    }

    fn sumset(&self, mask: u32) -> u32 {
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.rotate(mask, a);
        }
        out
    }

    fn difference_set(&self, mask: u32) -> u32 {
        let mut out = 0;
        let mut rest = mask;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.rotate(mask, self.n - a);
        }
        out
    }
}

fn check_n(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ModulusTooSmall { n: 0, min: 1 });
    }
    if n > limit {
        return Err(Error::EnumerationLimit {
            n: n as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// `weights[c] = p^c (1-p)^(n-c)`.
fn weights(n: usize, p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    (0..=n)
        .map(|c| num_traits::pow(p.clone(), c) * num_traits::pow(q.clone(), n - c))
        .collect()
}

fn weighted(counts: &[u64], w: &[BigRational]) -> BigRational {
    counts
        .iter()
        .zip(w)
        .filter(|(&c, _)| c != 0)
        .map(|(&c, w)| w * BigRational::from_integer(BigInt::from(c)))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

/// Splits `[0, 2^n)` into prefix blocks and folds `per_mask` over each,
/// combining the per-cardinality vectors by addition.
fn enumerate<T, F>(n: usize, include_empty: bool, width: usize, per_mask: F) -> Vec<T>
where
    T: Copy + Default + Send + std::ops::AddAssign,
    F: Fn(u32, &mut [T]) + Sync,
{
    let total = 1u64 << n;
    let block_bits = n.min(12);
    let blocks = total >> block_bits;
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut acc = vec![T::default(); width];
            let start = block << block_bits;
            for mask in start..start + (1u64 << block_bits) {
                if mask == 0 && !include_empty {
                    continue;
                }
                per_mask(mask as u32, &mut acc);
            }
            acc
        })
        .reduce(
            || vec![T::default(); width],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// `Pr[event]` (as a sub-probability over nonempty sets when
/// `include_empty` is false).
pub fn oracle_event_probability(
    n: usize,
    p: &BigRational,
    event: &Event,
    include_empty: bool,
) -> Result<BigRational> {
    check_n(n, PROBABILITY_LIMIT)?;
    let masks = Masks::new(n);
    let check_residue = |r: usize| -> Result<()> {
        if r >= n {
            return Err(Error::ResidueOutOfRange {
                value: r as u64,
                n: n as u64,
            });
        }
        Ok(())
    };
    match event {
        Event::DiffMissing(k) | Event::SumMissing(k) => check_residue(*k)?,
        Event::BothSumsMissing(i, j) => {
            check_residue(*i)?;
            check_residue(*j)?;
        }
        Event::Custom(_) => {}
    }
    let holds = |mask: u32| -> bool {
        match event {
            Event::DiffMissing(k) => masks.diff_missing(mask, *k),
            Event::SumMissing(k) => masks.sum_missing(mask, *k),
            Event::BothSumsMissing(i, j) => {
                masks.sum_missing(mask, *i) && masks.sum_missing(mask, *j)
            }
            Event::Custom(f) => f(&ResidueSet::from_mask(n, u64::from(mask)).expect("n <= 22")),
        }
    };
    let counts = enumerate::<u64, _>(n, include_empty, n + 1, |mask, acc| {
        if holds(mask) {
            acc[mask.count_ones() as usize] += 1;
        }
    });
    Ok(weighted(&counts, &weights(n, p)))
}

/// Exact first and second moments of `S^c = n - |A+A|` and `D^c = n - |A-A|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub e_sc: BigRational,
    pub e_dc: BigRational,
    pub var_sc: BigRational,
    pub var_dc: BigRational,
}

#[derive(Clone, Copy, Default)]
struct MomentSums {
    sc: u64,
    sc2: u64,
    dc: u64,
    dc2: u64,
}

impl std::ops::AddAssign for MomentSums {
    fn add_assign(&mut self, o: Self) {
        self.sc += o.sc;
        self.sc2 += o.sc2;
        self.dc += o.dc;
        self.dc2 += o.dc2;
    }
}

/// Moments over all subsets; with `include_empty = false` the empty set is
/// dropped without renormalizing.
pub fn oracle_moments(n: usize, p: &BigRational, include_empty: bool) -> Result<Moments> {
    check_n(n, MOMENT_LIMIT)?;
    let masks = Masks::new(n);
    let sums = enumerate::<MomentSums, _>(n, include_empty, n + 1, |mask, acc| {
        let sc = (n as u32 - masks.sumset(mask).count_ones()) as u64;
        let dc = (n as u32 - masks.difference_set(mask).count_ones()) as u64;
        let slot = &mut acc[mask.count_ones() as usize];
        *slot += MomentSums {
            sc,
            sc2: sc * sc,
            dc,
            dc2: dc * dc,
        };
    });
    let w = weights(n, p);
    let pick = |f: fn(&MomentSums) -> u64| weighted(&sums.iter().map(f).collect::<Vec<_>>(), &w);
    let e_sc = pick(|m| m.sc);
    let e_dc = pick(|m| m.dc);
    let var_sc = pick(|m| m.sc2) - &e_sc * &e_sc;
    let var_dc = pick(|m| m.dc2) - &e_dc * &e_dc;
    Ok(Moments {
        e_sc,
        e_dc,
        var_sc,
        var_dc,
    })
}
