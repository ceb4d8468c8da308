use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}` as a number: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: String,
}

/// Numeric field the library computes over.
///
/// Exact types (`BigRational`, `Rational64`) report a zero tolerance, so every
/// sign test below is an exact comparison. Floating-point types are supported
/// on a best-effort basis with a small absolute tolerance.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Magnitudes at or below this are treated as zero.
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn approx(&self) -> f64;

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;

    fn is_exact() -> bool {
        false
    }

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero_tol()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

fn parse_ratio_parts(s: &str) -> Result<(BigInt, BigInt), ParseScalarError> {
    let err = |reason: &str| ParseScalarError {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err("bad numerator"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok((n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| err("bad integer part"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("bad decimal digits"));
        }
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val = BigInt::from_str(frac).map_err(|_| err("bad decimal digits"))?;
        let num = if neg {
            int_part * &scale - frac_val
        } else {
            int_part * &scale + frac_val
        };
        return Ok((num, scale));
    }
    let n = BigInt::from_str(t).map_err(|_| err("not an integer, decimal, or p/q"))?;
    Ok((n, BigInt::one()))
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let (n, d) = parse_ratio_parts(s)?;
        Ok(BigRational::new(n, d))
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Rational64 {
    fn tolerance() -> Self {
        Rational64::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }

    fn approx(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let (n, d) = parse_ratio_parts(s)?;
        match (n.to_i64(), d.to_i64()) {
            (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
            _ => Err(ParseScalarError {
                input: s.to_string(),
                reason: "does not fit in 64-bit ratio".into(),
            }),
        }
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let (n, d) = parse_ratio_parts(s)?;
        Ok(BigRational::new(n, d).to_f64().unwrap_or(f64::NAN))
    }
}

/// Real line extended by both infinities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> Extended<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// Adds a finite amount; infinities absorb it.
    pub fn shift(&self, m: &T) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v.clone() + m.clone()),
            other => other.clone(),
        }
    }

    /// Multiplies by a strictly positive scalar.
    pub fn scale_pos(&self, lambda: &T) -> Self {
        debug_assert!(lambda.is_pos());
        match self {
            Extended::Finite(v) => Extended::Finite(v.clone() * lambda.clone()),
            other => other.clone(),
        }
    }

    /// Sum with the convention that `-inf` wins over `+inf` (inf-convolution
    /// style, used for upper bounds that may be `-inf`).
    pub fn add_lower(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::NegInf, _) | (_, Extended::NegInf) => Extended::NegInf,
            (Extended::PosInf, _) | (_, Extended::PosInf) => Extended::PosInf,
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.clone() + b.clone()),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v.approx(),
            Extended::PosInf => f64::INFINITY,
        }
    }
}

impl<T: Scalar> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Extended::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => write!(f, "-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => write!(f, "+inf"),
        }
    }
}

impl<T> From<T> for Extended<T> {
    fn from(v: T) -> Self {
        Extended::Finite(v)
    }
}

pub fn sum<T: Scalar>(items: impl IntoIterator<Item = T>) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Convenience constructor for exact rationals.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(BigRational::parse_scalar("3/6").unwrap(), rat(1, 2));
        assert_eq!(BigRational::parse_scalar("-7").unwrap(), rat(-7, 1));
        assert_eq!(BigRational::parse_scalar("0.25").unwrap(), rat(1, 4));
        assert_eq!(BigRational::parse_scalar("-1.5").unwrap(), rat(-3, 2));
        assert!(BigRational::parse_scalar("1/0").is_err());
        assert!(BigRational::parse_scalar("abc").is_err());
        assert!(BigRational::parse_scalar("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["1/3", "-5/2", "7", "0"] {
            let v = BigRational::parse_scalar(s).unwrap();
            assert_eq!(v.to_string(), s);
        }
    }

    #[test]
    fn extended_order() {
        let a: Extended<BigRational> = Extended::NegInf;
        let b = Extended::Finite(rat(-100, 1));
        let c = Extended::PosInf;
        assert!(a < b && b < c && a < c);
        assert_eq!(a.clone().max(b.clone()), b);
        assert_eq!(b.shift(&rat(1, 1)), Extended::Finite(rat(-99, 1)));
        assert_eq!(a.shift(&rat(5, 1)), Extended::NegInf);
    }

    #[test]
    fn float_tolerance() {
        assert!(1e-12_f64.is_zero_tol());
        assert!(!rat(1, 1_000_000_000_000).is_zero_tol());
    }
}
