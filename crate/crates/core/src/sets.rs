//! Residue sets over `Z/nZ`, binomial sampling, and the sumset /
//! difference-set kernels.
//!
//! A [`ResidueSet`] is a packed bit vector. Two kernels compute `A+A` and
//! `A-A`: the dense kernel ORs one cyclic rotation of the whole bit vector
//! per member (`O(|A| n / 64)` word operations), the sparse kernel
//! enumerates member pairs (`O(|A|^2)`). Both produce identical sets.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::probability::Probability;

const WORD_BITS: usize = 64;

fn word_count(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A subset of `Z/nZ` stored as a bit vector of length `n`.
///
/// Bits at positions `>= n` in the last word are always zero, so equality and
/// popcount work word-wise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    n: usize,
    words: Vec<u64>,
}

impl ResidueSet {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ModulusTooSmall { n: 0, min: 1 });
        }
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        let mut set = Self::empty(n)?;
        set.words.iter_mut().for_each(|w| *w = u64::MAX);
        set.clear_tail();
        Ok(set)
    }

    pub fn from_members<I>(n: usize, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(n)?;
        for r in members {
            if r >= n {
                return Err(Error::ResidueOutOfRange {
                    value: r as u64,
                    n: n as u64,
                });
            }
            set.insert(r);
        }
        Ok(set)
    }

    /// Builds a set from the low `n` bits of `mask` (bit `r` set means `r` is a member).
    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > WORD_BITS {
            return Err(Error::Parameter(format!(
                "a single-word mask covers at most {WORD_BITS} residues, got n = {n}"
            )));
        }
        let mut set = Self::empty(n)?;
        set.words[0] = mask;
        set.clear_tail();
        Ok(set)
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn contains(&self, r: usize) -> bool {
        r < self.n && self.words[r / WORD_BITS] >> (r % WORD_BITS) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD_BITS + bit)
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// `{ -a : a in A }`.
    pub fn negated(&self) -> Self {
        let mut out = Self {
            n: self.n,
            words: vec![0; self.words.len()],
        };
        for a in self.iter() {
            out.insert((self.n - a) % self.n);
        }
        out
    }

    pub(crate) fn insert(&mut self, r: usize) {
        debug_assert!(r < self.n);
        self.words[r / WORD_BITS] |= 1 << (r % WORD_BITS);
    }

    fn clear_tail(&mut self) {
        let used = self.n % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

/// Parameters identifying one binomial random subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub n: usize,
    pub p: Probability,
    pub base_seed: u64,
    pub trial_index: u64,
}

/// Random stream for one trial. The ChaCha key comes from `base_seed` and the
/// stream id is the trial index, so trial `t` sees the same words no matter
/// which worker runs it or in which order.
pub fn trial_rng(base_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial_index);
    rng
}

/// Below this cutoff (p < 1/16) the sampler jumps between members with
/// geometric gaps instead of drawing one word per residue.
const GEOMETRIC_CUTOFF: u128 = 1u128 << 60;

/// Draws `A ⊆ Z/nZ` with each residue included independently with
/// probability `spec.p`.
pub fn sample_subset(spec: &SampleSpec) -> Result<ResidueSet> {
    let mut set = ResidueSet::empty(spec.n)?;
    let cutoff = spec.p.cutoff();
    if cutoff == 0 {
        return Ok(set);
    }
    if cutoff >> 64 != 0 {
        return ResidueSet::full(spec.n);
    }
    let mut rng = trial_rng(spec.base_seed, spec.trial_index);
    if cutoff < GEOMETRIC_CUTOFF {
        // Number of failures before the next success is
        // floor(ln U / ln(1 - p)) for U uniform on (0, 1].
        let p = cutoff as f64 / 2f64.powi(64);
        let log_q = (-p).ln_1p();
        let mut pos = 0usize;
        loop {
            let u = ((rng.next_u64() >> 11) + 1) as f64 * 2f64.powi(-53);
            let gap = (u.ln() / log_q).floor();
            if gap >= (spec.n - pos) as f64 {
                break;
            }
            pos += gap as usize;
            set.insert(pos);
            pos += 1;
            if pos >= spec.n {
                break;
            }
        }
    } else {
        for r in 0..spec.n {
            if u128::from(rng.next_u64()) < cutoff {
                set.insert(r);
            }
        }
    }
    Ok(set)
}

/// Which sumset kernel to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Auto,
    Dense,
    Sparse,
}

/// Sparse pair enumeration when `128 |A| < n`, dense rotations otherwise.
///
/// Sparse work is about `|A|^2` pair updates and dense work about `|A| n / 64`
/// word operations; a pair update measures several times slower than a word
/// operation, which puts the crossover near `|A| = n / 128`.
pub fn choose_kernel(card: usize, n: usize) -> Kernel {
    if (card as u128) * 128 < n as u128 {
        Kernel::Sparse
    } else {
        Kernel::Dense
    }
}

fn resolve(kernel: Kernel, a: &ResidueSet) -> Kernel {
    match kernel {
        Kernel::Auto => choose_kernel(a.len(), a.n),
        k => k,
    }
}

/// `A + A = { a + b mod n : a, b in A }` (with `a = b` allowed).
pub fn sumset(a: &ResidueSet) -> ResidueSet {
    sumset_with(a, Kernel::Auto)
}

pub fn sumset_with(a: &ResidueSet, kernel: Kernel) -> ResidueSet {
    match resolve(kernel, a) {
        Kernel::Sparse => sparse_sumset(a),
        _ => dense_combine(a, |member, n| member % n),
    }
}

/// `A - A = { a - b mod n : a, b in A }`.
pub fn difference_set(a: &ResidueSet) -> ResidueSet {
    difference_set_with(a, Kernel::Auto)
}

pub fn difference_set_with(a: &ResidueSet, kernel: Kernel) -> ResidueSet {
    match resolve(kernel, a) {
        Kernel::Sparse => sparse_difference_set(a),
        _ => dense_combine(a, |member, n| (n - member) % n),
    }
}

/// Number of residues missing from `A+A` and from `A-A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MissingCounts {
    pub sums: usize,
    pub diffs: usize,
}

pub fn missing_counts(a: &ResidueSet) -> MissingCounts {
    MissingCounts {
        sums: a.n - sumset(a).len(),
        diffs: a.n - difference_set(a).len(),
    }
}

fn sparse_sumset(a: &ResidueSet) -> ResidueSet {
    let n = a.n;
    let members = a.members();
    let mut out = ResidueSet {
        n,
        words: vec![0; a.words.len()],
    };
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i..] {
            let s = x + y;
            out.insert(if s >= n { s - n } else { s });
        }
    }
    out
}

fn sparse_difference_set(a: &ResidueSet) -> ResidueSet {
    let n = a.n;
    let members = a.members();
    let mut out = ResidueSet {
        n,
        words: vec![0; a.words.len()],
    };
    if members.is_empty() {
        return out;
    }
    out.insert(0);
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            // y > x, so y - x lies in (0, n) and its negation is n - (y - x).
            let d = y - x;
            out.insert(d);
            out.insert(n - d);
        }
    }
    out
}

/// ORs, for every member `a`, the set rotated by `shift(a, n)`.
fn dense_combine(a: &ResidueSet, shift: impl Fn(usize, usize) -> usize) -> ResidueSet {
    let n = a.n;
    let mut acc = ResidueSet {
        n,
        words: vec![0; a.words.len()],
    };
    if a.is_empty() {
        return acc;
    }
    // Two back-to-back copies of A, so the rotation by s is the n-bit window
    // starting at bit n - s. Two spare words keep every window read in bounds.
    let mut doubled = vec![0u64; word_count(2 * n) + 2];
    or_at_offset(&mut doubled, &a.words, 0);
    or_at_offset(&mut doubled, &a.words, n);
    for member in a.iter() {
        let s = shift(member, n);
        or_window(&mut acc.words, &doubled, n - s);
    }
    acc.clear_tail();
    acc
}

fn or_at_offset(dst: &mut [u64], src: &[u64], offset: usize) {
    let base = offset / WORD_BITS;
    let bit = offset % WORD_BITS;
    for (i, &w) in src.iter().enumerate() {
        dst[base + i] |= w << bit;
        if bit != 0 {
            dst[base + i + 1] |= w >> (WORD_BITS - bit);
        }
    }
}

fn or_window(acc: &mut [u64], src: &[u64], offset: usize) {
    let base = offset / WORD_BITS;
    let bit = offset % WORD_BITS;
    if bit == 0 {
        for (dst, &w) in acc.iter_mut().zip(&src[base..]) {
            *dst |= w;
        }
    } else {
        for (i, dst) in acc.iter_mut().enumerate() {
            let lo = src[base + i] >> bit;
            let hi = src[base + i + 1] << (WORD_BITS - bit);
            *dst |= lo | hi;
        }
    }
}
