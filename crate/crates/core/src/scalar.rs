//! Numeric abstraction shared by every discrete computation.
//!
//! Discrete laws, joint laws, couplings and the simplex are written once
//! against [`Scalar`]. Instantiated with [`Rational`](crate::Rational) every
//! verdict is decided by exact comparisons; instantiated with `f64` or `f32`
//! the same code runs in floating point for quick exploratory use.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when `+ - * /` and comparisons are exact.
    const EXACT: bool;

    /// Parses `"3"`, `"-0.25"`, `"1e-3"` or `"7/12"`.
    fn parse_literal(s: &str) -> Option<Self>;

    /// JSON form: exact types become `"num/den"` strings, floats stay numbers.
    fn to_json(&self) -> serde_json::Value;

    /// Converts a user-facing decimal float. Exact types take the shortest
    /// decimal that round-trips, so `0.1` becomes `1/10` rather than the
    /// binary expansion.
    fn from_decimal_f64(x: f64) -> Option<Self>;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("i64 is representable") / Self::from_i64(den).expect("i64 is representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Rejects NaN (the only value for which the order is not total).
    fn is_comparable(&self) -> bool {
        self.partial_cmp(self).is_some()
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

    /// `max(self, 0)`.
    fn positive_part(&self) -> Self {
        if self.is_positive() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_decimal_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        parse_decimal(&format!("{x}"))
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn parse_literal(s: &str) -> Option<Self> {
                match s.split_once('/') {
                    Some((n, d)) => {
                        let n: $t = n.trim().parse().ok()?;
                        let d: $t = d.trim().parse().ok()?;
                        if d == 0.0 {
                            None
                        } else {
                            Some(n / d)
                        }
                    }
                    None => s.trim().parse().ok(),
                }
            }

            fn to_json(&self) -> serde_json::Value {
                serde_json::Number::from_f64(*self as f64)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            }

            fn from_decimal_f64(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Parses `a/b`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n)?;
        let d = parse_decimal(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    parse_decimal(s)
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
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
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// `1 - x`, used all over for complementary probabilities.
pub(crate) fn complement<T: Scalar>(x: &T) -> T {
    T::one() - x.clone()
}

pub(crate) fn sum<'a, T: Scalar, I: IntoIterator<Item = &'a T>>(items: I) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x.clone())
}
