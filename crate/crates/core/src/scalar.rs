//! Scalar types that distances are measured in.
//!
//! Everything in this crate is generic over [`Scalar`]. The exact instance is
//! [`BigRational`]: every construction (gluing, interpolation, defect scans)
//! is closed under `+ - * /`, `min` and `max`, so exact rationals never round.
//! `f64`/`f32` are supported for callers that already live in floating point.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// A totally ordered field-like number type usable as a distance value.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic on this type never rounds.
    const EXACT: bool;

    /// Parses a decimal (`"0.25"`, `"-3"`, `"1e-2"`) or fraction (`"3/8"`) string.
    fn parse_text(text: &str) -> Option<Self>;

    /// Canonical text form: `"p/q"` (or `"p"` when integral) for exact types,
    /// 17 significant digits for floats.
    fn to_text(&self) -> String;

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits in scalar")
    }

    /// `num / den` as a scalar; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half(&self) -> Self {
        self.clone() / Self::two()
    }

    fn lossy_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// The exact rational value, `None` for non-finite floats.
    fn to_exact(&self) -> Option<BigRational>;
}

/// Larger of two scalars (the first on ties).
pub fn smax<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// Smaller of two scalars (the first on ties).
pub fn smin<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// `base^exp` for a non-negative integer exponent.
pub fn ipow<T: Scalar>(base: &T, exp: u32) -> T {
    num_traits::pow(base.clone(), exp as usize)
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn parse_text(text: &str) -> Option<Self> {
        parse_rational(text)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn parse_text(text: &str) -> Option<Self> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            return (q != 0.0).then(|| p / q);
        }
        t.parse().ok().filter(|v: &f64| v.is_finite())
    }

    fn to_text(&self) -> String {
        format_float(*self)
    }

    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn parse_text(text: &str) -> Option<Self> {
        f64::parse_text(text).map(|v| v as f32)
    }

    fn to_text(&self) -> String {
        format!("{:.8e}", self)
    }

    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

/// Formats a float with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{:.16e}", v)
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{}{}", int_part, frac_part);
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Shorthand for building exact rationals in code and tests.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact integer value of a rational, if it has one.
pub fn as_integer(v: &BigRational) -> Option<BigInt> {
    v.denom().is_one().then(|| v.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(BigRational::parse_text("1/2"), Some(rat(1, 2)));
        assert_eq!(BigRational::parse_text(" 6/4 "), Some(rat(3, 2)));
        assert_eq!(BigRational::parse_text("0.25"), Some(rat(1, 4)));
        assert_eq!(BigRational::parse_text("-1.5"), Some(rat(-3, 2)));
        assert_eq!(BigRational::parse_text("3"), Some(rat(3, 1)));
        assert_eq!(BigRational::parse_text("1e-2"), Some(rat(1, 100)));
        assert_eq!(BigRational::parse_text("2.5E1"), Some(rat(25, 1)));
        assert_eq!(BigRational::parse_text(".5"), Some(rat(1, 2)));
        assert_eq!(BigRational::parse_text("1/0"), None);
        assert_eq!(BigRational::parse_text("abc"), None);
        assert_eq!(BigRational::parse_text(""), None);
        assert_eq!(BigRational::parse_text("."), None);
    }

    #[test]
    fn emits_reduced_fractions() {
        assert_eq!(rat(2, 4).to_text(), "1/2");
        assert_eq!(rat(4, 2).to_text(), "2");
        assert_eq!(rat(0, 5).to_text(), "0");
    }

    #[test]
    fn float_text_has_17_significant_digits() {
        let s = 0.1f64.to_text();
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(f64::parse_text(&s), Some(0.1));
        assert_eq!(f64::parse_text("1/4"), Some(0.25));
    }

    #[test]
    fn helpers() {
        assert_eq!(smax(rat(1, 2), rat(1, 3)), rat(1, 2));
        assert_eq!(smin(rat(1, 2), rat(1, 3)), rat(1, 3));
        assert_eq!(ipow(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(rat(3, 1).half(), rat(3, 2));
        assert_eq!(as_integer(&rat(6, 3)), Some(BigInt::from(2)));
        assert_eq!(as_integer(&rat(1, 3)), None);
        assert_eq!(0.75f64.to_exact(), Some(rat(3, 4)));
        assert_eq!(f64::NAN.to_exact(), None);
    }
}
