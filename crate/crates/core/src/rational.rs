//! Exact rational arithmetic on machine words.
//!
//! All values flowing through the optimizers are `Ratio<i128>`. Every
//! arithmetic step that could overflow goes through the checked helpers
//! below and surfaces [`Error::Overflow`] instead of wrapping or panicking.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rational(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

pub fn integer(v: i128) -> Rational {
    Ratio::from_integer(v)
}

pub fn checked_add(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub fn checked_sub(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub fn checked_mul(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::Domain("division by zero".into()));
    }
    a.checked_div(b).ok_or(Error::Overflow)
}

pub fn checked_sum<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Result<Rational> {
    items
        .into_iter()
        .try_fold(Rational::zero(), |acc, x| checked_add(&acc, x))
}

/// `floor(value / unit)` as a nonnegative integer count of `unit`s.
pub fn floor_multiple(value: &Rational, unit: &Rational) -> Result<u64> {
    let q = checked_div(value, unit)?;
    if q.is_negative() {
        return Err(Error::Invariant(format!(
            "negative marginal {value} (objective is not monotone)"
        )));
    }
    q.floor().to_integer().to_u64().ok_or(Error::Overflow)
}

/// Parses `"3"`, `"-2"`, `"5/2"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Semantic(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(rational(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let w: i128 = if whole_digits.is_empty() {
            0
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let scale = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let magnitude = w
            .checked_mul(scale)
            .and_then(|x| x.checked_add(f))
            .ok_or_else(bad)?;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(rational(numer, scale));
    }
    let n: i128 = t.parse().map_err(|_| bad())?;
    Ok(integer(n))
}

/// Renders `r` as a decimal string with exactly `places` digits after the
/// point, rounding half away from zero.
pub fn to_decimal(r: &Rational, places: u32) -> String {
    let scale = 10i128.pow(places);
    let negative = r.is_negative();
    let abs = r.abs();
    // round(|r| * scale) computed as floor(|r| * scale + 1/2)
    let scaled = (abs.numer() * scale * 2 + abs.denom()) / (abs.denom() * 2);
    let whole = scaled / scale;
    let frac = scaled % scale;
    let sign = if negative && scaled != 0 { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0width$}", width = places as usize)
    }
}

/// Exact value returned by a value oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ObjectiveValue(pub Rational);

impl ObjectiveValue {
    pub fn zero() -> Self {
        ObjectiveValue(Rational::zero())
    }

    pub fn from_integer(v: i128) -> Self {
        ObjectiveValue(integer(v))
    }

    pub fn get(&self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        checked_add(&self.0, &other.0).map(ObjectiveValue)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        checked_sub(&self.0, &other.0).map(ObjectiveValue)
    }
}

impl From<Rational> for ObjectiveValue {
    fn from(r: Rational) -> Self {
        ObjectiveValue(r)
    }
}

impl fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ObjectiveValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(ObjectiveValue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3").unwrap(), integer(3));
        assert_eq!(parse_rational(" 5/2 ").unwrap(), rational(5, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rational(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rational(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), rational(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&integer(1), 6), "1.000000");
        assert_eq!(to_decimal(&rational(5, 2), 6), "2.500000");
        assert_eq!(to_decimal(&rational(2, 3), 6), "0.666667");
        assert_eq!(to_decimal(&rational(1, 3), 6), "0.333333");
        assert_eq!(to_decimal(&rational(-1, 8), 2), "-0.13");
    }

    #[test]
    fn floor_multiple_counts_units() {
        assert_eq!(floor_multiple(&integer(1), &rational(1, 12)).unwrap(), 12);
        assert_eq!(
            floor_multiple(&rational(5, 12), &rational(1, 4)).unwrap(),
            1
        );
        assert_eq!(floor_multiple(&integer(0), &rational(1, 4)).unwrap(), 0);
        assert!(floor_multiple(&integer(-1), &rational(1, 4)).is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let big = integer(i128::MAX);
        assert_eq!(checked_add(&big, &integer(1)), Err(Error::Overflow));
        assert_eq!(checked_mul(&big, &integer(2)), Err(Error::Overflow));
    }
}
