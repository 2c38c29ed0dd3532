//! Deterministic parallel Monte Carlo sweeps over the decay regimes.
//!
//! Every trial draws its set from the stream `(base_seed, trial_index)`, and
//! aggregates are built from exact accumulators (integers, and a rational sum
//! for the ratio), so the output does not depend on the number of workers or
//! on how rayon splits the work.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, rational_to_f64, TargetRegime};
use crate::multiplicity::{self, Side};
use crate::primes::is_prime;
use crate::probability::Probability;
use crate::sets::{self, ResidueSet, SampleSpec};

/// How `p` depends on `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `p = n^-delta`, `delta > 1/2`.
    Fast {
        delta: f64,
    },
    /// `p = c n^-1/2`.
    Critical {
        c: f64,
    },
    /// `p = n^-delta`, `0 < delta < 1/2`.
    Slow {
        delta: f64,
    },
    /// `p = gamma sqrt(ln n / n)`.
    Intermediate {
        gamma: f64,
    },
    Fixed {
        p: Probability,
    },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Fast { .. } => "fast",
            Regime::Critical { .. } => "critical",
            Regime::Slow { .. } => "slow",
            Regime::Intermediate { .. } => "intermediate",
            Regime::Fixed { .. } => "fixed",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::Fast { delta } if !(delta > 0.5) => Err(Error::Regime(format!(
                "fast decay needs delta > 1/2, got {delta}"
            ))),
            Regime::Slow { delta } if !(delta > 0.0 && delta < 0.5) => Err(Error::Regime(format!(
                "slow decay needs 0 < delta < 1/2, got {delta}"
            ))),
            Regime::Critical { c } if !(c > 0.0) => Err(Error::Regime(format!(
                "critical decay needs c > 0, got {c}"
            ))),
            Regime::Intermediate { gamma } if !(gamma > 0.0) => Err(Error::Regime(format!(
                "intermediate regime needs gamma > 0, got {gamma}"
            ))),
            _ => Ok(()),
        }
    }

    /// `p(n)`, realized as a dyadic rational with 64 fractional bits (fixed
    /// probabilities are kept as given).
    pub fn probability(&self, n: u64) -> Result<Probability> {
        self.validate()?;
        let n_f = n as f64;
        let p = match self {
            Regime::Fast { delta } | Regime::Slow { delta } => n_f.powf(-delta),
            Regime::Critical { c } => c / n_f.sqrt(),
            Regime::Intermediate { gamma } => gamma * (n_f.ln() / n_f).sqrt(),
            Regime::Fixed { p } => return Ok(p.clone()),
        };
        Probability::from_f64_dyadic(p)
    }

    pub fn target_regime(&self) -> Option<TargetRegime> {
        match *self {
            Regime::Fast { delta } => Some(TargetRegime::Fast { delta }),
            Regime::Critical { c } => Some(TargetRegime::Critical { c }),
            Regime::Slow { delta } => Some(TargetRegime::Slow { delta }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeSpec {
    pub regime: Regime,
    pub n_values: Vec<u64>,
    pub require_prime: bool,
    pub trials: u64,
    pub base_seed: u64,
    /// Collect `X_k`, `Y_k` for `k = 1..=kmax`; 0 disables collection.
    pub kmax: u32,
}

/// Default `kmax` when collection is requested without an explicit bound.
pub const DEFAULT_KMAX: u32 = 5;

impl RegimeSpec {
    pub fn new(regime: Regime, n_values: Vec<u64>, trials: u64, base_seed: u64) -> Self {
        Self {
            regime,
            n_values,
            require_prime: false,
            trials,
            base_seed,
            kmax: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.regime.validate()?;
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be positive".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::Parameter("no moduli given".into()));
        }
        for &n in &self.n_values {
            if n == 0 {
                return Err(Error::ModulusTooSmall { n, min: 1 });
            }
            if self.require_prime && !is_prime(n) {
                return Err(Error::NotPrime(n));
            }
        }
        Ok(())
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: u64,
    pub p_num: String,
    pub p_den: String,
    pub p_float: f64,
    pub trial: u64,
    pub card: u64,
    pub s: u64,
    pub d: u64,
    pub sc: u64,
    pub dc: u64,
    /// `D / S`; absent when `S = 0`.
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub xk: Vec<u128>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub yk: Vec<u128>,
}

/// Fraction of trials on which the inclusion-exclusion identity is re-checked.
const SPOT_CHECK_EVERY: u64 = 100;

pub fn run_trial(
    n: u64,
    p: &Probability,
    base_seed: u64,
    trial_index: u64,
    kmax: u32,
) -> Result<TrialRecord> {
    let spec = SampleSpec {
        n: n as usize,
        p: p.clone(),
        base_seed,
        trial_index,
    };
    let a = sets::sample_subset(&spec)?;
    let s = sets::sumset(&a).len() as u64;
    let d = sets::difference_set(&a).len() as u64;
    let (xk, yk) = if kmax > 0 || trial_index % SPOT_CHECK_EVERY == 0 {
        moment_columns(&a, s, d, trial_index, kmax)?
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(TrialRecord {
        n,
        p_num: p.numer().to_string(),
        p_den: p.denom().to_string(),
        p_float: p.to_f64(),
        trial: trial_index,
        card: a.len() as u64,
        s,
        d,
        sc: n - s,
        dc: n - d,
        ratio: (s > 0).then(|| d as f64 / s as f64),
        xk,
        yk,
    })
}

fn moment_columns(
    a: &ResidueSet,
    s: u64,
    d: u64,
    trial_index: u64,
    kmax: u32,
) -> Result<(Vec<u128>, Vec<u128>)> {
    let profile = multiplicity::multiplicity_profile(a);
    if trial_index % SPOT_CHECK_EVERY == 0 {
        for (side, size) in [(Side::Sum, s), (Side::Difference, d)] {
            let ie = multiplicity::inclusion_exclusion_size(&profile, side);
            if ie != BigInt::from(size) {
                return Err(Error::Invariant(format!(
                    "trial {trial_index}: inclusion-exclusion gives {ie} for {side:?}, kernel gives {size}"
                )));
            }
        }
    }
    let ks = 1..=u64::from(kmax);
    let xk = ks
        .clone()
        .map(|k| multiplicity::saturating_u128(&multiplicity::x_k(&profile, k)))
        .collect();
    let yk = ks
        .map(|k| multiplicity::saturating_u128(&multiplicity::y_k(&profile, k)))
        .collect();
    Ok((xk, yk))
}

/// Sample statistics of one quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stat {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

impl Stat {
    fn from_rational_sums(count: u64, sum: &BigRational, sum_sq: &BigRational) -> Self {
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let n = BigRational::from_integer(count.into());
        let mean = sum / &n;
        let variance = if count > 1 {
            let n1 = BigRational::from_integer((count - 1).into());
            rational_to_f64(&((sum_sq - sum * &mean) / n1))
        } else {
            0.0
        };
        Self {
            count,
            mean: rational_to_f64(&mean),
            variance,
            std_error: (variance / count as f64).sqrt(),
        }
    }

    fn from_int_sums(count: u64, sum: u128, sum_sq: u128) -> Self {
        let r = |v: u128| BigRational::from_integer(BigInt::from(v));
        Self::from_rational_sums(count, &r(sum), &r(sum_sq))
    }
}

#[derive(Clone, Copy, Default)]
struct IntMoment {
    sum: u128,
    sum_sq: u128,
}

impl IntMoment {
    fn push(&mut self, v: u128) {
        self.sum += v;
        self.sum_sq = self.sum_sq.saturating_add(v.saturating_mul(v));
    }

    fn merge(&mut self, o: &Self) {
        self.sum += o.sum;
        self.sum_sq = self.sum_sq.saturating_add(o.sum_sq);
    }
}

/// Exact accumulator; `merge` is associative and commutative.
#[derive(Clone)]
struct Accumulator {
    count: u64,
    card: IntMoment,
    s: IntMoment,
    d: IntMoment,
    sc: IntMoment,
    dc: IntMoment,
    s_full: u64,
    d_full: u64,
    both_full: u64,
    ratio_count: u64,
    ratio_sum: BigRational,
    ratio_sq: BigRational,
    xk: Vec<IntMoment>,
    yk: Vec<IntMoment>,
    yk_nonzero: Vec<IntMoment>,
}

impl Accumulator {
    fn new(kmax: usize) -> Self {
        Self {
            count: 0,
            card: IntMoment::default(),
            s: IntMoment::default(),
            d: IntMoment::default(),
            sc: IntMoment::default(),
            dc: IntMoment::default(),
            s_full: 0,
            d_full: 0,
            both_full: 0,
            ratio_count: 0,
            ratio_sum: BigRational::zero(),
            ratio_sq: BigRational::zero(),
            xk: vec![IntMoment::default(); kmax],
            yk: vec![IntMoment::default(); kmax],
            yk_nonzero: vec![IntMoment::default(); kmax],
        }
    }

    fn push(mut self, r: &TrialRecord) -> Self {
        self.count += 1;
        self.card.push(r.card.into());
        self.s.push(r.s.into());
        self.d.push(r.d.into());
        self.sc.push(r.sc.into());
        self.dc.push(r.dc.into());
        self.s_full += u64::from(r.sc == 0);
        self.d_full += u64::from(r.dc == 0);
        self.both_full += u64::from(r.sc == 0 && r.dc == 0);
        if r.s > 0 {
            let ratio = BigRational::new(r.d.into(), r.s.into());
            self.ratio_count += 1;
            self.ratio_sq += &ratio * &ratio;
            self.ratio_sum += ratio;
        }
        for (k, acc) in self.xk.iter_mut().enumerate() {
            acc.push(r.xk.get(k).copied().unwrap_or(0));
        }
        for (k, acc) in self.yk.iter_mut().enumerate() {
            let y = r.yk.get(k).copied().unwrap_or(0);
            acc.push(y);
            let zero_diff =
                multiplicity::saturating_u128(&exact::binomial(r.card as i64, k as i64 + 1));
            self.yk_nonzero[k].push(y.saturating_sub(zero_diff));
        }
        self
    }

    fn merge(mut self, o: Self) -> Self {
        self.count += o.count;
        for (a, b) in [
            (&mut self.card, &o.card),
            (&mut self.s, &o.s),
            (&mut self.d, &o.d),
            (&mut self.sc, &o.sc),
            (&mut self.dc, &o.dc),
        ] {
            a.merge(b);
        }
        self.s_full += o.s_full;
        self.d_full += o.d_full;
        self.both_full += o.both_full;
        self.ratio_count += o.ratio_count;
        self.ratio_sum += o.ratio_sum;
        self.ratio_sq += o.ratio_sq;
        for (a, b) in self
            .xk
            .iter_mut()
            .chain(self.yk.iter_mut())
            .chain(self.yk_nonzero.iter_mut())
            .zip(o.xk.iter().chain(o.yk.iter()).chain(o.yk_nonzero.iter()))
        {
            a.merge(b);
        }
        self
    }
}

/// Statistics for one `(regime, n)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAggregate {
    pub regime: String,
    pub n: u64,
    pub p_num: String,
    pub p_den: String,
    pub p_float: f64,
    pub trials: u64,
    pub card: Stat,
    pub s: Stat,
    pub d: Stat,
    pub sc: Stat,
    pub dc: Stat,
    /// Over trials with `S > 0` only.
    pub ratio: Stat,
    pub frac_s_full: f64,
    pub frac_d_full: f64,
    pub frac_both_full: f64,
    pub xk: Vec<Stat>,
    pub yk: Vec<Stat>,
    /// `Y_k` without the `C(|A|, k)` contribution of the zero difference.
    pub yk_nonzero: Vec<Stat>,
}

pub fn aggregate(
    regime: &Regime,
    n: u64,
    p: &Probability,
    records: &[TrialRecord],
    kmax: u32,
) -> SweepAggregate {
    let kmax = kmax as usize;
    let acc = records
        .par_iter()
        .fold(|| Accumulator::new(kmax), Accumulator::push)
        .reduce(|| Accumulator::new(kmax), Accumulator::merge);
    let stat = |m: &IntMoment| Stat::from_int_sums(acc.count, m.sum, m.sum_sq);
    let frac = |v: u64| v as f64 / acc.count as f64;
    SweepAggregate {
        regime: regime.name().to_string(),
        n,
        p_num: p.numer().to_string(),
        p_den: p.denom().to_string(),
        p_float: p.to_f64(),
        trials: acc.count,
        card: stat(&acc.card),
        s: stat(&acc.s),
        d: stat(&acc.d),
        sc: stat(&acc.sc),
        dc: stat(&acc.dc),
        ratio: Stat::from_rational_sums(acc.ratio_count, &acc.ratio_sum, &acc.ratio_sq),
        frac_s_full: frac(acc.s_full),
        frac_d_full: frac(acc.d_full),
        frac_both_full: frac(acc.both_full),
        xk: acc.xk.iter().map(stat).collect(),
        yk: acc.yk.iter().map(stat).collect(),
        yk_nonzero: acc.yk_nonzero.iter().map(stat).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub spec: RegimeSpec,
    /// Sorted by `(n, trial)` in the order of `spec.n_values`.
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<SweepAggregate>,
}

/// Runs `spec.trials` trials for each modulus; `workers = None` uses the
/// global rayon pool.
pub fn run_sweep(spec: &RegimeSpec, workers: Option<usize>) -> Result<Sweep> {
    spec.validate()?;
    let body = || -> Result<Sweep> {
        let mut records = Vec::with_capacity(spec.n_values.len() * spec.trials as usize);
        let mut aggregates = Vec::with_capacity(spec.n_values.len());
        for &n in &spec.n_values {
            let p = spec.regime.probability(n)?;
            let batch = (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(n, &p, spec.base_seed, t, spec.kmax))
                .collect::<Result<Vec<_>>>()?;
            aggregates.push(aggregate(&spec.regime, n, &p, &batch, spec.kmax));
            records.extend(batch);
        }
        Ok(Sweep {
            spec: spec.clone(),
            records,
            aggregates,
        })
    };
    match workers {
        None => body(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?
            .install(body),
    }
}

/// One empirical-versus-target comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: u64,
    pub quantity: String,
    pub empirical: f64,
    pub target: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub std_error: f64,
}

impl ReportRow {
    fn new(n: u64, quantity: &str, empirical: f64, target: f64, std_error: f64) -> Self {
        let abs_error = (empirical - target).abs();
        Self {
            n,
            quantity: quantity.to_string(),
            empirical,
            target,
            abs_error,
            rel_error: if target != 0.0 {
                abs_error / target.abs()
            } else {
                f64::NAN
            },
            std_error,
        }
    }

    /// `|empirical - target|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        self.abs_error / self.std_error
    }
}

/// Compares an aggregate with the limits for its regime.
///
/// Fast and critical decay use the closed-form limits; slow decay and fixed
/// `p` report the fraction of balanced full trials. The intermediate window
/// has no limit law, so its rows compare the mean number of missing sums and
/// differences with their exact finite-`n` expectations.
pub fn convergence_report(agg: &SweepAggregate, regime: &Regime) -> Result<Vec<ReportRow>> {
    let n = agg.n;
    let n_f = n as f64;
    let mut rows = Vec::new();
    match regime {
        Regime::Fast { .. } => {
            let np = n_f * agg.p_float;
            rows.push(ReportRow::new(
                n,
                "S",
                agg.s.mean,
                np * np / 2.0,
                agg.s.std_error,
            ));
            rows.push(ReportRow::new(n, "D", agg.d.mean, np * np, agg.d.std_error));
            rows.push(ReportRow::new(
                n,
                "D/S",
                agg.ratio.mean,
                2.0,
                agg.ratio.std_error,
            ));
        }
        Regime::Critical { c } => {
            let t = exact::theoretical_targets(TargetRegime::Critical { c: *c }, n)?;
            rows.push(ReportRow::new(
                n,
                "S/n",
                agg.s.mean / n_f,
                t.sums / n_f,
                agg.s.std_error / n_f,
            ));
            rows.push(ReportRow::new(
                n,
                "D/n",
                agg.d.mean / n_f,
                t.diffs / n_f,
                agg.d.std_error / n_f,
            ));
            rows.push(ReportRow::new(
                n,
                "D/S",
                agg.ratio.mean,
                t.ratio,
                agg.ratio.std_error,
            ));
        }
        Regime::Slow { .. } | Regime::Fixed { .. } => {
            rows.push(ReportRow::new(
                n,
                "frac(S=n)",
                agg.frac_s_full,
                1.0,
                f64::NAN,
            ));
            rows.push(ReportRow::new(
                n,
                "frac(D=n)",
                agg.frac_d_full,
                1.0,
                f64::NAN,
            ));
            rows.push(ReportRow::new(
                n,
                "S/n",
                agg.s.mean / n_f,
                1.0,
                agg.s.std_error / n_f,
            ));
            rows.push(ReportRow::new(
                n,
                "D/n",
                agg.d.mean / n_f,
                1.0,
                agg.d.std_error / n_f,
            ));
        }
        Regime::Intermediate { .. } => {
            let p = regime.probability(n)?;
            if n % 2 == 1 {
                let exact_sc = exact::exact_expected_missing_sums(n, p.exact())?;
                rows.push(ReportRow::new(
                    n,
                    "Sc",
                    agg.sc.mean,
                    rational_to_f64(&exact_sc),
                    agg.sc.std_error,
                ));
                let two_element = exact::expected_missing_sums(n, p.exact())?;
                rows.push(ReportRow::new(
                    n,
                    "Sc_two_element_form",
                    agg.sc.mean,
                    rational_to_f64(&two_element),
                    agg.sc.std_error,
                ));
            }
            if is_prime(n) {
                rows.push(ReportRow::new(
                    n,
                    "Dc",
                    agg.dc.mean,
                    rational_to_f64(&expected_missing_diffs_with_empty(n, &p)?),
                    agg.dc.std_error,
                ));
            }
        }
    }
    Ok(rows)
}

/// Exact `E[n - |A-A|]` for prime `n`, empty set included: every `k != 0` is
/// missing with the cycle independence probability, and `0` is missing only
/// when `A` is empty.
pub fn expected_missing_diffs_with_empty(n: u64, p: &Probability) -> Result<BigRational> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    let cycle = exact::cycle_independence_probability(n, p.exact())?;
    let empty = num_traits::pow(p.complement(), n as usize);
    Ok(cycle * BigRational::from_integer((n - 1).into()) + empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_validation() {
        assert!(Regime::Fast { delta: 0.5 }.validate().is_err());
        assert!(Regime::Slow { delta: 0.5 }.validate().is_err());
        assert!(Regime::Critical { c: 0.0 }.validate().is_err());
        assert!(Regime::Intermediate { gamma: -1.0 }.validate().is_err());
        assert!(Regime::Fast { delta: 0.6 }.validate().is_ok());
    }

    #[test]
    fn regime_probabilities() {
        let p = Regime::Critical { c: 1.0 }.probability(10007).unwrap();
        assert!((p.to_f64() - 10007f64.powf(-0.5)).abs() < 1e-18);
        let fixed = Regime::Fixed {
            p: "1/2".parse().unwrap(),
        };
        assert_eq!(fixed.probability(99).unwrap().to_string(), "1/2");
        assert!(Regime::Critical { c: 200.0 }.probability(100).is_err());
    }

    #[test]
    fn require_prime_rejects_composites() {
        let mut spec = RegimeSpec::new(Regime::Slow { delta: 0.25 }, vec![10007, 10000], 2, 1);
        spec.require_prime = true;
        assert_eq!(run_sweep(&spec, None).unwrap_err(), Error::NotPrime(10000));
    }

    #[test]
    fn records_are_consistent() {
        let mut spec = RegimeSpec::new(Regime::Critical { c: 1.0 }, vec![101, 211], 40, 7);
        spec.kmax = 3;
        let sweep = run_sweep(&spec, Some(2)).unwrap();
        assert_eq!(sweep.records.len(), 80);
        for r in &sweep.records {
            assert_eq!(r.s + r.sc, r.n);
            assert_eq!(r.d + r.dc, r.n);
            assert_eq!(r.xk.len(), 3);
            assert_eq!(r.xk[0], (r.card * (r.card + 1) / 2) as u128);
            assert_eq!(r.yk[0], (r.card * r.card) as u128);
            assert_eq!(r.ratio.is_some(), r.s > 0);
        }
        assert_eq!(sweep.aggregates.len(), 2);
        assert_eq!(sweep.aggregates[0].trials, 40);
    }

    #[test]
    fn aggregate_is_schedule_independent() {
        let spec = RegimeSpec::new(Regime::Intermediate { gamma: 1.0 }, vec![401], 64, 11);
        let one = run_sweep(&spec, Some(1)).unwrap();
        let four = run_sweep(&spec, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn stat_from_sums() {
        // values 1, 2, 3, 4
        let s = Stat::from_int_sums(4, 10, 30);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!(Stat::from_int_sums(0, 0, 0).mean.is_nan());
    }

    #[test]
    fn missing_diffs_with_empty_matches_oracle() {
        for n in [5u64, 7, 11] {
            let p = Probability::from_ratio(1, 3).unwrap();
            let oracle = crate::oracle::oracle_moments(n as usize, p.exact(), true).unwrap();
            assert_eq!(
                expected_missing_diffs_with_empty(n, &p).unwrap(),
                oracle.e_dc
            );
        }
    }
}
