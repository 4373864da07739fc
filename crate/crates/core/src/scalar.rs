//! The two numeric modes: exact rationals and `f64`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Scalar field used by every computation. A computation runs entirely in
/// one mode; values are never mixed.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Signed + Send + Sync + 'static
{
    /// True for the exact rational mode.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Nearest value in the mode (exact binary expansion for rationals).
    fn from_f64(x: f64) -> Self;

    /// Zero test: exact equality in rational mode, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Square root when it exists in the mode: always for non-negative
    /// floats, only for perfect squares in rational mode.
    fn try_sqrt(&self) -> Option<Self>;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_negligible(tol)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let exact_root = |x: &BigInt| {
            let root = x.sqrt();
            (&root * &root == *x).then_some(root)
        };
        Some(BigRational::new(exact_root(self.numer())?, exact_root(self.denom())?))
    }
}

/// Exact rational shorthand.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, an integer, or a decimal such as `"-0.125"` or `"2.5e-3"`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse {
        line: 0,
        column: 0,
        message: format!("invalid number `{text}`: {msg}"),
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad("bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad("unexpected character"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad("digits"))?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if negative { -value } else { value })
}

/// Renders a rational as `num/den` (denominator always present).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Renders a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// Exact square of a scalar.
pub fn sq<S: Scalar>(x: &S) -> S {
    x.clone() * x.clone()
}

pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(items: I) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

pub fn is_one<S: Scalar>(x: &S) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), rational(1, 3));
        assert_eq!(parse_rational("-6/4").unwrap(), rational(-3, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rational(1, 8));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), rational(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), rational(7, 1));
        assert_eq!(parse_rational("3e2").unwrap(), rational(300, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_rationals_with_denominator() {
        assert_eq!(format_rational(&rational(-543127, 165888)), "-543127/165888");
        assert_eq!(format_rational(&rational(-4, 1)), "-4/1");
    }

    #[test]
    fn float_format_keeps_seventeen_digits() {
        let text = format_float(0.1);
        assert_eq!(text.parse::<f64>().unwrap(), 0.1);
        assert_eq!(text.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }

    #[test]
    fn square_roots_exist_only_for_perfect_squares_in_rational_mode() {
        assert_eq!(rational(9, 4).try_sqrt(), Some(rational(3, 2)));
        assert_eq!(rational(2, 1).try_sqrt(), None);
        assert_eq!(rational(-1, 4).try_sqrt(), None);
        assert_eq!(Rational::zero().try_sqrt(), Some(Rational::zero()));
        assert_eq!(2.25_f64.try_sqrt(), Some(1.5));
        assert_eq!((-1.0_f64).try_sqrt(), None);
    }

    #[test]
    fn negligibility_depends_on_mode() {
        assert!(1e-12_f64.is_negligible(1e-9));
        assert!(!rational(1, 1_000_000_000_000).is_negligible(1e-9));
        assert!(Rational::zero().is_negligible(0.0));
    }
}
