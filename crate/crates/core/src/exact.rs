//! Exact rational evaluation of the closed-form counts and probabilities.
//!
//! All probabilities take `p` as an exact [`BigRational`]. Sums of the form
//! `sum_r c_r p^r (1-p)^(m-r)` are accumulated over the common denominator
//! `b^m` (with `p = a/b`) and reduced once at the end; when `b` is a power of
//! two the reduction is a shift, which keeps 64-bit dyadic inputs cheap even
//! for `n` in the tens of thousands.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `C(a, b)`, zero whenever `a < 0`, `b < 0` or `b > a`.
pub fn binomial(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b) as u64;
    let a = a as u64;
    let mut acc = BigUint::one();
    for i in 1..=b {
        acc = acc * (a - b + i) / i;
    }
    acc
}

/// Number of `r`-subsets of a path on `m` vertices with no two adjacent:
/// `C(m - r + 1, r)`.
pub fn path_count(m: u64, r: u64) -> BigUint {
    binomial(m as i64 - r as i64 + 1, r as i64)
}

/// Number of `k`-subsets of an `n`-cycle with no two adjacent:
/// `D(n, k) = C(n-k+1, k) - C(n-k-1, k-2)`.
pub fn cycle_count(n: u64, k: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    let (n, k) = (n as i64, k as i64);
    let total = BigInt::from(binomial(n - k + 1, k)) - BigInt::from(binomial(n - k - 1, k - 2));
    // Out-of-range k makes both terms vanish or the first dominate; never negative.
    Ok(total.to_biguint().unwrap_or_default())
}

/// Lucas numbers, `L_0 = 2`, `L_1 = 1`.
pub fn lucas(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::from(2u32), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `p = a/b` split into `a`, `q = b - a` and `b`.
struct Split {
    a: BigUint,
    q: BigUint,
    b: BigUint,
}

impl Split {
    fn new(p: &BigRational) -> Self {
        assert!(
            !p.is_negative() && *p <= BigRational::one(),
            "probability outside [0, 1]: {p}"
        );
        let a = p.numer().magnitude().clone();
        let b = p.denom().magnitude().clone();
        let q = &b - &a;
        Self { a, q, b }
    }

    /// `num / b^exp`, reduced.
    fn ratio(&self, num: BigUint, exp: u64) -> BigRational {
        make_ratio(num.into(), num_traits::pow(self.b.clone(), exp as usize))
    }

    /// `sum_{r=lo}^{hi} coeff(r) a^r q^(m-r)`: the numerator of
    /// `sum_r coeff(r) p^r (1-p)^(m-r)` over `b^m`.
    fn mixture(&self, m: u64, lo: u64, hi: u64, coeff: impl Fn(u64) -> BigUint) -> BigUint {
        let hi = hi.min(m);
        if hi < lo {
            return BigUint::zero();
        }
        // Horner on the homogeneous form: h = sum_r c_r a^r q^(hi - r).
        let mut h = BigUint::zero();
        let mut a_pow = num_traits::pow(self.a.clone(), lo as usize);
        for r in lo..=hi {
            h = h * &self.q + coeff(r) * &a_pow;
            a_pow *= &self.a;
        }
        h * num_traits::pow(self.q.clone(), (m - hi) as usize)
    }

    /// `J(m) = b^m Pr[a p-random subset of the m-vertex path is independent]`,
    /// via `J(m) = q (J(m-1) + a J(m-2))`, `J(0) = 1`, `J(1) = b`.
    fn path_scaled(&self, m: u64) -> BigUint {
        let mut prev = BigUint::one();
        if m == 0 {
            return prev;
        }
        let mut cur = self.b.clone();
        for _ in 2..=m {
            let next = &self.q * (&cur + &self.a * &prev);
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }
}

/// Builds a reduced rational, shifting instead of running a gcd when the
/// denominator is a power of two.
pub(crate) fn make_ratio(num: BigInt, den: BigUint) -> BigRational {
    if num.is_zero() {
        return BigRational::zero();
    }
    if den.count_ones() == 1 {
        let shift = num
            .trailing_zeros()
            .unwrap_or(0)
            .min(den.trailing_zeros().unwrap_or(0));
        return BigRational::new_raw(num >> shift, BigInt::from(den >> shift));
    }
    BigRational::new(num, BigInt::from(den))
}

/// `sum_{r=lo}^{hi} coeff(r) p^r (1-p)^(m-r)`, exactly.
fn binomial_mixture(
    m: u64,
    lo: u64,
    hi: u64,
    p: &BigRational,
    coeff: impl Fn(u64) -> BigUint,
) -> BigRational {
    let s = Split::new(p);
    s.ratio(s.mixture(m, lo, hi, coeff), m)
}

/// `F(n) = sum_{r=0}^{floor(n/2)} C(n-r, r) p^r (1-p)^(n-r)`, evaluated
/// term by term.
pub fn f_series_by_sum(n: u64, p: &BigRational) -> BigRational {
    binomial_mixture(n, 0, n / 2, p, |r| binomial((n - r) as i64, r as i64))
}

/// Probability that a `p`-random subset of a path on `m` vertices contains no
/// two adjacent vertices: `sum_r C(m-r+1, r) p^r (1-p)^(m-r)`.
pub fn path_independence_probability(m: u64, p: &BigRational) -> BigRational {
    let s = Split::new(p);
    s.ratio(s.path_scaled(m), m)
}

fn f_series_numerator(n: u64, s: &Split) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    &s.q * s.path_scaled(n - 1)
}

/// `F(n)` through the path recurrence, since `C(n-r, r)` counts independent
/// `r`-sets of the `(n-1)`-vertex path: `F(n) = (1-p) I(n-1)`.
pub fn f_series(n: u64, p: &BigRational) -> BigRational {
    let s = Split::new(p);
    s.ratio(f_series_numerator(n, &s), n)
}

/// Probability that a `p`-random subset of the `n`-cycle is independent,
/// empty set included: `sum_{r>=0} D(n, r) p^r (1-p)^(n-r)`.
pub fn cycle_independence_probability(n: u64, p: &BigRational) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    let s = Split::new(p);
    let num = if n == 2 {
        &s.b * &s.b - &s.a * &s.a
    } else {
        // Vertex 0 absent: path on n-1. Present: both neighbours absent, path on n-3.
        &s.q * s.path_scaled(n - 1) + &s.a * &s.q * &s.q * s.path_scaled(n - 3)
    };
    Ok(s.ratio(num, n))
}

fn require_odd(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ModulusTooSmall { n, min: 1 });
    }
    if n % 2 == 0 {
        return Err(Error::EvenModulus(n));
    }
    Ok(())
}

/// `n (1 - p^2)^((n+1)/2)`: the expected number of missing sums when every
/// one of the `(n+1)/2` representations of a residue is treated as a
/// two-element event.
///
/// The representation `2a ≡ k` needs only one element, so the exact
/// expectation is [`exact_expected_missing_sums`]; the two differ by the
/// factor `1 + p`.
pub fn expected_missing_sums(n: u64, p: &BigRational) -> Result<BigRational> {
    require_odd(n)?;
    let s = Split::new(p);
    let e = n.div_ceil(2);
    let base = &s.b * &s.b - &s.a * &s.a;
    Ok(s.ratio(BigUint::from(n) * num_traits::pow(base, e as usize), 2 * e))
}

/// Exact `E[n - |A+A|]` for odd `n`: `n (1-p) (1-p^2)^((n-1)/2)`.
///
/// For odd `n` each residue `k` has one representation `k = 2a` and
/// `(n-1)/2` representations `k = a + b` with `a != b`, all on disjoint
/// elements, so the events are independent.
pub fn exact_expected_missing_sums(n: u64, p: &BigRational) -> Result<BigRational> {
    require_odd(n)?;
    let s = Split::new(p);
    let e = (n - 1) / 2;
    let base = &s.b * &s.b - &s.a * &s.a;
    Ok(s.ratio(
        BigUint::from(n) * &s.q * num_traits::pow(base, e as usize),
        2 * e + 1,
    ))
}

fn diff_missing_numerator(n: u64, s: &Split) -> BigUint {
    s.mixture(n, 1, n / 2, |r| cycle_count(n, r).expect("n >= 2"))
}

/// `sum_{r=1}^{floor(n/2)} D(n, r) p^r (1-p)^(n-r)`: probability that a fixed
/// `k != 0` is missing from `A - A` *and* `A` is nonempty, for prime `n`.
pub fn prob_diff_missing(n: u64, p: &BigRational) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    let s = Split::new(p);
    Ok(s.ratio(diff_missing_numerator(n, &s), n))
}

/// The same sum with the cycle length `n / d` in place of `n`, raised to the
/// power `d = gcd(n, k)`: one factor per cycle of the difference graph.
///
/// Each factor starts at `r = 1`, so it conditions every cycle on meeting
/// `A`; for composite `n` this is not the exact probability, which is why
/// callers compare it against the oracle instead of asserting equality.
pub fn prob_diff_missing_composite(n: u64, k: u64, p: &BigRational) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    if k % n == 0 {
        return Err(Error::ZeroResidue { k, n });
    }
    let d = n.gcd(&(k % n));
    let len = n / d;
    let s = Split::new(p);
    let per_cycle = s.mixture(len, 1, n / (2 * d), |r| {
        cycle_count(len, r).expect("cycle length >= 2")
    });
    Ok(s.ratio(num_traits::pow(per_cycle, d as usize), n))
}

/// Probability that two distinct residues `i != j` are both missing from
/// `A + A` for prime `n`: the two loop ends of the sum graph are excluded and
/// the `n - 2` interior path vertices form an independent set,
/// `(1-p)^2 sum_r C(n-2-r+1, r) p^r (1-p)^(n-2-r)`.
pub fn prob_both_sums_missing(n: u64, p: &BigRational) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    let m = n - 2;
    let s = Split::new(p);
    let inner = s.mixture(m, 0, m.div_ceil(2), |r| path_count(m, r));
    Ok(s.ratio(&s.q * &s.q * inner, n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissingDiffs {
    /// `(n - 1) * prob_diff_missing(n, p)`.
    pub value: BigRational,
    /// `2 n F(n)`.
    pub bound: BigRational,
}

/// Expected number of missing nonzero differences over nonempty `A` (prime
/// `n`), together with the upper bound `2 n F(n)`.
pub fn expected_missing_diffs(n: u64, p: &BigRational) -> Result<MissingDiffs> {
    if n < 2 {
        return Err(Error::ModulusTooSmall { n, min: 2 });
    }
    let s = Split::new(p);
    let value = diff_missing_numerator(n, &s) * (n - 1);
    let bound = f_series_numerator(n, &s) * (2 * n);
    // Same denominator b^n on both sides.
    assert!(
        value <= bound,
        "missing-difference bound violated at n = {n}"
    );
    Ok(MissingDiffs {
        value: s.ratio(value, n),
        bound: s.ratio(bound, n),
    })
}

/// `G = n (1-p^2)^(n/2)` and `h = 2 n^4 (e^p - p e^p)^n` with their logs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gauges {
    pub g: f64,
    pub h: f64,
    pub log_g: f64,
    pub log_h: f64,
}

pub fn gauge_functions(n: u64, p: f64) -> Result<Gauges> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    let n_f = n as f64;
    let log_g = n_f.ln() + 0.5 * n_f * (-p * p).ln_1p();
    let log_h = 2f64.ln() + 4.0 * n_f.ln() + n_f * (p + (-p).ln_1p());
    Ok(Gauges {
        g: log_g.exp(),
        h: log_h.exp(),
        log_g,
        log_h,
    })
}

/// `G^2 = n^2 (1-p^2)^n`, exactly; a rational cross-check for `log_g`.
pub fn gauge_g_squared_exact(n: u64, p: &BigRational) -> BigRational {
    let s = Split::new(p);
    let base = &s.b * &s.b - &s.a * &s.a;
    let num = BigUint::from(n) * BigUint::from(n) * num_traits::pow(base, n as usize);
    s.ratio(num, 2 * n)
}

/// Compares `x` and `y` by cross-multiplication.
pub fn cmp_rational(x: &BigRational, y: &BigRational) -> std::cmp::Ordering {
    (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits").to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational, with no underflow for tiny values.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log of non-positive rational");
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Float rendering of an exact rational (0 for values below `f64` range).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match r.to_f64() {
        Some(v) if v.is_finite() && v != 0.0 => v,
        _ => {
            let sign = if r.numer().sign() == Sign::Minus {
                -1.0
            } else {
                1.0
            };
            sign * ln_rational(&r.abs()).exp()
        }
    }
}

/// Decay regimes with closed-form limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "regime")]
pub enum TargetRegime {
    /// `p = n^-delta`, `delta > 1/2`.
    Fast { delta: f64 },
    /// `p = c n^-1/2`.
    Critical { c: f64 },
    /// `p = n^-delta`, `0 < delta < 1/2`.
    Slow { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Targets {
    pub sums: f64,
    pub diffs: f64,
    pub ratio: f64,
}

/// Limiting `|A+A|`, `|A-A|` and `|A-A|/|A+A|`.
///
/// Critical decay targets `n (1 - e^(-c^2/2))` and `n (1 - e^(-c^2))`, whose
/// quotient is `1 + e^(-c^2/2)`.
pub fn theoretical_targets(regime: TargetRegime, n: u64) -> Result<Targets> {
    let n_f = n as f64;
    match regime {
        TargetRegime::Fast { delta } => {
            if !(delta > 0.5) {
                return Err(Error::Regime(format!(
                    "fast decay needs delta > 1/2, got {delta}"
                )));
            }
            let np = n_f * n_f.powf(-delta);
            Ok(Targets {
                sums: np * np / 2.0,
                diffs: np * np,
                ratio: 2.0,
            })
        }
        TargetRegime::Critical { c } => {
            if !(c > 0.0) {
                return Err(Error::Regime(format!(
                    "critical decay needs c > 0, got {c}"
                )));
            }
            Ok(Targets {
                sums: n_f * (1.0 - (-c * c / 2.0).exp()),
                diffs: n_f * (1.0 - (-c * c).exp()),
                ratio: 1.0 + (-c * c / 2.0).exp(),
            })
        }
        TargetRegime::Slow { delta } => {
            if !(delta > 0.0 && delta < 0.5) {
                return Err(Error::Regime(format!(
                    "slow decay needs 0 < delta < 1/2, got {delta}"
                )));
            }
            Ok(Targets {
                sums: n_f,
                diffs: n_f,
                ratio: 1.0,
            })
        }
    }
}
