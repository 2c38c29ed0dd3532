//! Run parameters from flags and an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use modsetlab::experiments::Regime;
use modsetlab::{next_prime, Probability};
use serde::{Deserialize, Deserializer, Serialize};

use crate::Failure;

pub const SEED_ENV: &str = "MODSETLAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeName {
    Fast,
    Critical,
    Slow,
    Intermediate,
    Fixed,
}

/// Every parameter is optional here; the config file fills gaps and flags
/// win over it.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Modulus (sweeps accept a comma-separated list)
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Vec<u64>,
    /// Probability as NUM/DEN or a decimal
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeName>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed (default: $MODSETLAB_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub i: Option<u64>,
    #[arg(long)]
    pub j: Option<u64>,
    /// Collect X_k and Y_k for k = 1..=kmax
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Collect X_k and Y_k up to the default kmax
    #[arg(long)]
    #[serde(default)]
    pub moments: bool,
    /// Reject composite moduli
    #[arg(long)]
    #[serde(default)]
    pub require_prime: bool,
    /// Replace each modulus by the smallest prime at or above it
    #[arg(long)]
    #[serde(default)]
    pub next_prime: bool,
    /// Count the empty set in oracle enumerations
    #[arg(long)]
    #[serde(default)]
    pub include_empty: bool,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(u64),
        Many(Vec<u64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

pub fn load_file(path: &Path) -> Result<Params, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Param(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Param(format!("{}: {e}", path.display())))
}

impl Params {
    /// `self` (flags) over `file`.
    pub fn over(self, file: Params) -> Params {
        Params {
            n: if self.n.is_empty() { file.n } else { self.n },
            p: self.p.or(file.p),
            regime: self.regime.or(file.regime),
            delta: self.delta.or(file.delta),
            c: self.c.or(file.c),
            gamma: self.gamma.or(file.gamma),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            workers: self.workers.or(file.workers),
            out: self.out.or(file.out),
            k: self.k.or(file.k),
            i: self.i.or(file.i),
            j: self.j.or(file.j),
            kmax: self.kmax.or(file.kmax),
            moments: self.moments || file.moments,
            require_prime: self.require_prime || file.require_prime,
            next_prime: self.next_prime || file.next_prime,
            include_empty: self.include_empty || file.include_empty,
        }
    }

    pub fn moduli(&self) -> Result<Vec<u64>, Failure> {
        if self.n.is_empty() {
            return Err(Failure::Param("--n is required".into()));
        }
        Ok(if self.next_prime {
            self.n.iter().map(|&n| next_prime(n.max(2))).collect()
        } else {
            self.n.clone()
        })
    }

    pub fn single_n(&self) -> Result<u64, Failure> {
        match self.moduli()?.as_slice() {
            [n] => Ok(*n),
            _ => Err(Failure::Param("expected a single --n".into())),
        }
    }

    pub fn probability(&self) -> Result<Probability, Failure> {
        let text = self
            .p
            .as_deref()
            .ok_or_else(|| Failure::Param("--p is required".into()))?;
        Ok(text.parse::<Probability>()?)
    }

    fn need(v: Option<f64>, flag: &str, regime: &str) -> Result<f64, Failure> {
        v.ok_or_else(|| Failure::Param(format!("--regime {regime} needs --{flag}")))
    }

    /// The regime named by `--regime`, or fixed `p` when only `--p` is given.
    pub fn regime(&self) -> Result<Regime, Failure> {
        let name = match (self.regime, &self.p) {
            (Some(r), _) => r,
            (None, Some(_)) => RegimeName::Fixed,
            (None, None) => return Err(Failure::Param("--regime or --p is required".into())),
        };
        let regime = match name {
            RegimeName::Fast => Regime::Fast {
                delta: Self::need(self.delta, "delta", "fast")?,
            },
            RegimeName::Critical => Regime::Critical {
                c: Self::need(self.c, "c", "critical")?,
            },
            RegimeName::Slow => Regime::Slow {
                delta: Self::need(self.delta, "delta", "slow")?,
            },
            RegimeName::Intermediate => Regime::Intermediate {
                gamma: Self::need(self.gamma, "gamma", "intermediate")?,
            },
            RegimeName::Fixed => Regime::Fixed {
                p: self.probability()?,
            },
        };
        regime.validate()?;
        Ok(regime)
    }

    pub fn seed(&self) -> Result<u64, Failure> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::Param(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
            }),
            Err(_) => Ok(0),
        }
    }

    pub fn k(&self) -> Result<u64, Failure> {
        self.k
            .ok_or_else(|| Failure::Param("--k is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_take_precedence() {
        let file: Params =
            toml::from_str("n = [11, 13]\np = \"1/3\"\ntrials = 9\nrequire-prime = true").unwrap();
        let flags = Params {
            p: Some("1/2".into()),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.n, vec![11, 13]);
        assert_eq!(merged.p.as_deref(), Some("1/2"));
        assert_eq!(merged.trials, Some(9));
        assert!(merged.require_prime);
    }

    #[test]
    fn scalar_n_in_file() {
        let file: Params = toml::from_str("n = 7").unwrap();
        assert_eq!(file.n, vec![7]);
        assert!(toml::from_str::<Params>("bogus = 1").is_err());
    }

    #[test]
    fn regime_resolution() {
        let p = Params {
            regime: Some(RegimeName::Critical),
            ..Default::default()
        };
        assert!(p.regime().is_err());
        let p = Params {
            p: Some("1/4".into()),
            ..Default::default()
        };
        assert!(matches!(p.regime().unwrap(), Regime::Fixed { .. }));
        let p = Params {
            n: vec![10000],
            next_prime: true,
            ..Default::default()
        };
        assert_eq!(p.moduli().unwrap(), vec![10007]);
    }
}
