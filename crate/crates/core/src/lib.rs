//! Sumsets and difference sets of binomial random subsets of `Z/nZ`.
//!
//! * [`sets`]: residue sets, seeded sampling, dense and sparse kernels.
//! * [`multiplicity`]: representation counts, `X_k`, `Y_k`, inclusion-exclusion.
//! * [`exact`]: exact rational closed forms (path and cycle counts, Lucas
//!   numbers, `F(n)`, missing-sum and missing-difference probabilities).
//! * [`graph`] and [`oracle`]: sum/difference graphs and the `2^n`
//!   enumeration oracle.
//! * [`experiments`]: parallel deterministic sweeps and convergence reports.

pub mod acceptance;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod multiplicity;
pub mod oracle;
pub mod primes;
pub mod probability;
pub mod report;
pub mod sets;

pub use error::{Error, Result};
pub use exact::{Gauges, MissingDiffs, TargetRegime, Targets};
pub use experiments::{
    convergence_report, run_sweep, Regime, RegimeSpec, ReportRow, Stat, Sweep, SweepAggregate,
    TrialRecord,
};
pub use graph::{GraphKind, PairGraph};
pub use multiplicity::{MultiplicityProfile, Side};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use oracle::{Event, Moments};
pub use primes::{is_prime, next_prime};
pub use probability::{Probability, RationalRecord};
pub use sets::{Kernel, MissingCounts, ResidueSet, SampleSpec};
