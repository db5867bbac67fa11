//! Exact rational weights.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("weight {0} lies outside [0, 1]")]
    OutOfRange(String),
    #[error("cannot parse `{0}` as an integer")]
    Parse(String),
}

/// A probability-like value held exactly, in lowest terms, within `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalWeight(BigRational);

impl RationalWeight {
    pub fn new(value: BigRational) -> Result<Self, RationalError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(RationalError::OutOfRange(value.to_string()));
        }
        Ok(Self(value))
    }

    /// `num / den`, reduced.
    pub fn from_ints(num: u64, den: u64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Self::new(BigRational::new(num.into(), den.into()))
    }

    /// Parses the decimal-string pair used by the JSON formats.
    pub fn from_strs(num: &str, den: &str) -> Result<Self, RationalError> {
        let n = BigInt::from_str(num.trim()).map_err(|_| RationalError::Parse(num.to_owned()))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| RationalError::Parse(den.to_owned()))?;
        if d.sign() != Sign::Plus {
            return Err(RationalError::ZeroDenominator);
        }
        Self::new(BigRational::new(n, d))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

impl fmt::Display for RationalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<RationalWeight> for BigRational {
    fn from(w: RationalWeight) -> Self {
        w.0
    }
}

impl TryFrom<BigRational> for RationalWeight {
    type Error = RationalError;

    fn try_from(value: BigRational) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for RationalWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        RationalWeight::from_strs(&repr.num, &repr.den).map_err(de::Error::custom)
    }
}

/// Lossy conversion that stays accurate for huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both down by a common power of two before dividing.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact value of a finite `f64`.
pub fn f64_to_ratio(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Closest rational with denominator at most `max_den` to the non-negative
/// value `target`. Walks the continued-fraction convergents and compares the
/// last convergent with the best semiconvergent below the bound.
pub fn best_rational_approximation(target: &BigRational, max_den: &BigInt) -> BigRational {
    assert!(!target.is_negative(), "target must be non-negative");
    assert!(max_den.is_positive(), "max_den must be positive");
    if target.denom() <= max_den {
        return target.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (target.numer().clone(), target.denom().clone());
    loop {
        let (a, rem) = n.div_rem(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        n = std::mem::replace(&mut d, rem);
    }
    let k = (max_den - &q0) / &q1;
    let semi = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = BigRational::new(p1, q1);
    if (&conv - target).abs() <= (&semi - target).abs() {
        conv
    } else {
        semi
    }
}

/// Least common multiple of the denominators of `values`.
pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
