//! Exact rational scalars and the loop parameter.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let src = src.trim();
    let bad = || Error::Parse(format!("not a rational: {src:?}"));
    let (num, den) = match src.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (src, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {src:?}")));
    }
    Ok(Scalar::new(num, den))
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The parameter `λ` of `M_k(λ⁻¹)`, restricted to rationals in `(0, 1/3]`.
///
/// Closed loops evaluate to `δ = λ⁻¹`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lambda(Scalar);

impl Lambda {
    pub fn new(value: Scalar) -> Result<Self> {
        if !value.is_positive() || value > ratio(1, 3) {
            return Err(Error::Domain(format!("lambda must lie in (0, 1/3], got {}", format_scalar(&value))));
        }
        Ok(Lambda(value))
    }

    /// Convenience constructor for `1/den` style parameters.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(ratio(num, den))
    }

    pub fn value(&self) -> &Scalar {
        &self.0
    }

    /// The loop value `δ = λ⁻¹`.
    pub fn delta(&self) -> Scalar {
        self.0.recip()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// `λ = 1/3` is the only case with `q = 1`.
    pub fn is_critical(&self) -> bool {
        self.0 == ratio(1, 3)
    }
}

impl FromStr for Lambda {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lambda::new(parse_scalar(s)?)
    }
}

impl fmt::Debug for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lambda({})", format_scalar(&self.0))
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scalar(&self.0))
    }
}

pub(crate) fn pow(x: &Scalar, e: u32) -> Scalar {
    let mut acc = Scalar::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("2/6").unwrap(), ratio(1, 3));
        assert_eq!(parse_scalar(" -3/4 ").unwrap(), ratio(-3, 4));
        assert_eq!(parse_scalar("5").unwrap(), int(5));
        assert_eq!(format_scalar(&ratio(4, -6)), "-2/3");
        assert_eq!(format_scalar(&int(7)), "7");
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn lambda_range() {
        assert!(Lambda::from_ratio(1, 3).is_ok());
        assert!(Lambda::from_ratio(1, 4).is_ok());
        assert!(Lambda::from_ratio(1, 2).is_err());
        assert!(Lambda::from_ratio(0, 1).is_err());
        assert!(Lambda::from_ratio(-1, 5).is_err());
        assert_eq!(Lambda::from_ratio(1, 4).unwrap().delta(), int(4));
        assert!("1/3".parse::<Lambda>().unwrap().is_critical());
    }
}
