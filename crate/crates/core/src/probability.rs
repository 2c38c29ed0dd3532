use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Number of fractional bits used when a real-valued probability is
/// realized as a dyadic rational, and the resolution of the sampler.
pub const FRACTION_BITS: u32 = 64;

/// An inclusion probability in `[0, 1]`, stored exactly.
///
/// The sampler draws a uniform 64-bit word per Bernoulli trial and accepts
/// when it falls below [`Probability::cutoff`], so dyadic probabilities with
/// at most 64 fractional bits are sampled without any rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probability {
    exact: BigRational,
    cutoff: u128,
}

impl Probability {
    pub fn new(exact: BigRational) -> Result<Self> {
        if exact.is_negative() || exact > BigRational::one() {
            return Err(Error::InvalidProbability(exact.to_string()));
        }
        let scaled = (exact.numer() << FRACTION_BITS) / exact.denom();
        let cutoff = scaled
            .to_u128()
            .expect("p <= 1 keeps the cutoff within 65 bits");
        Ok(Self { exact, cutoff })
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::MalformedProbability(format!("{num}/{den}")));
        }
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Realizes a real probability as `floor(x * 2^64) / 2^64`.
    pub fn from_f64_dyadic(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || x.is_nan() {
            return Err(Error::InvalidProbability(x.to_string()));
        }
        if x == 1.0 {
            return Ok(Self::one());
        }
        // x < 1, so x * 2^64 < 2^64 and the truncating cast is an exact floor.
        let scaled = (x * 2f64.powi(FRACTION_BITS as i32)) as u128;
        Self::new(BigRational::new(
            BigInt::from(scaled),
            BigInt::one() << FRACTION_BITS,
        ))
    }

    pub fn zero() -> Self {
        Self {
            exact: BigRational::zero(),
            cutoff: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            exact: BigRational::one(),
            cutoff: 1u128 << FRACTION_BITS,
        }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    /// `1 - p`, exactly.
    pub fn complement(&self) -> BigRational {
        BigRational::one() - &self.exact
    }

    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::NAN)
    }

    /// Acceptance threshold on a uniform 64-bit draw; `2^64` means "always".
    pub fn cutoff(&self) -> u128 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }

    pub fn numer(&self) -> BigUint {
        self.exact.numer().magnitude().clone()
    }

    pub fn denom(&self) -> BigUint {
        self.exact.denom().magnitude().clone()
    }
}

impl Serialize for Probability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl From<Probability> for BigRational {
    fn from(p: Probability) -> Self {
        p.exact
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.exact.numer(), self.exact.denom())
    }
}

/// Accepts `NUM/DEN`, an integer, or a plain decimal such as `0.25`
/// (decimals are read as exact base-10 fractions).
impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::MalformedProbability(s.to_string());
        let value = if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            BigRational::new(num, den)
        } else if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int = if int.is_empty() { "0" } else { int };
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10u32), frac.len());
            BigRational::new(digits, scale)
        } else {
            let v: BigInt = s.parse().map_err(|_| bad())?;
            BigRational::from_integer(v)
        };
        Self::new(value)
    }
}

/// Exact rational rendered for reports: numerator and denominator as strings
/// plus a float approximation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalRecord {
    pub num: String,
    pub den: String,
    pub float: f64,
}

impl From<&BigRational> for RationalRecord {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            float: crate::exact::rational_to_f64(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let half: Probability = "1/2".parse().unwrap();
        assert_eq!(half.cutoff(), 1u128 << 63);
        let dec: Probability = "0.25".parse().unwrap();
        assert_eq!(dec.exact(), &BigRational::new(1.into(), 4.into()));
        let one: Probability = "1".parse().unwrap();
        assert!(one.is_one());
        assert_eq!(one.cutoff(), 1u128 << 64);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            "3/2".parse::<Probability>(),
            Err(Error::InvalidProbability(_))
        ));
        assert!("-1/3".parse::<Probability>().is_err());
        assert!("1/0".parse::<Probability>().is_err());
        assert!("abc".parse::<Probability>().is_err());
        assert!(Probability::from_f64_dyadic(1.5).is_err());
        assert!(Probability::from_f64_dyadic(f64::NAN).is_err());
    }

    #[test]
    fn dyadic_realization_floors_at_64_bits() {
        let p = Probability::from_f64_dyadic(0.5).unwrap();
        assert_eq!(p.exact(), &BigRational::new(1.into(), 2.into()));
        let q = Probability::from_f64_dyadic(10007f64.powf(-0.5)).unwrap();
        assert!(q.denom().bits() <= 65);
        assert!((q.to_f64() - 10007f64.powf(-0.5)).abs() < 1e-18);
    }
}
