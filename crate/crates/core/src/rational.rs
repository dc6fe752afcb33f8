//! Exact rational numbers with overflow-checked `i64` storage.
//!
//! Interval endpoints, shifts, periods and coset offsets all live here so
//! that every set-theoretic hypothesis is decided without rounding. Any
//! intermediate that does not fit in `i64` after reduction is reported as
//! [`Error::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn reduce128(num: i128, den: i128) -> Result<Rational> {
    if den == 0 {
        return Err(Error::InvalidInput("rational with zero denominator".into()));
    }
    let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(num), Ok(den)) if num != i64::MIN => Ok(Rational { num, den }),
        _ => Err(Error::Overflow),
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        reduce128(num as i128, den as i128)
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        reduce128(self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128, self.den as i128 * rhs.den as i128)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        reduce128(self.num as i128 * rhs.den as i128 - rhs.num as i128 * self.den as i128, self.den as i128 * rhs.den as i128)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        reduce128(self.num as i128 * rhs.num as i128, self.den as i128 * rhs.den as i128)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.num == 0 {
            return Err(Error::InvalidInput("division by zero rational".into()));
        }
        reduce128(self.num as i128 * rhs.den as i128, self.den as i128 * rhs.num as i128)
    }

    pub fn abs(self) -> Self {
        Rational { num: self.num.abs(), den: self.den }
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i64 {
        -(-self.num).div_euclid(self.den)
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        Rational { num: self.num.rem_euclid(self.den), den: self.den }
    }

    /// Representative of `self` modulo `period` in `[0, period)`, together
    /// with the integer `q` such that `self = rem + q * period`.
    pub fn rem_euclid(self, period: Rational) -> Result<(Rational, i64)> {
        if !period.is_positive() {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        let q = self.checked_div(period)?.floor();
        let rem = self.checked_sub(period.checked_mul(Rational::integer(q))?)?;
        Ok((rem, q))
    }

    /// Distance from `self` to the lattice `period * Z`.
    pub fn dist_to_lattice(self, period: Rational) -> Result<Rational> {
        let (r, _) = self.rem_euclid(period)?;
        let other = period.checked_sub(r)?;
        Ok(if r <= other { r } else { other })
    }

    /// Positive generator of `a Z + b Z` for positive rationals.
    pub fn gcd(self, other: Rational) -> Result<Rational> {
        let den = self.den as i128 * other.den as i128;
        let a = self.num as i128 * other.den as i128;
        let b = other.num as i128 * self.den as i128;
        reduce128(a.abs().gcd(&b.abs()), den)
    }

    /// Smallest positive common multiple of two positive rationals.
    pub fn lcm(self, other: Rational) -> Result<Rational> {
        let den = self.den as i128 * other.den as i128;
        let a = self.num as i128 * other.den as i128;
        let b = other.num as i128 * self.den as i128;
        let g = a.abs().gcd(&b.abs());
        let l = (a.abs() / g).checked_mul(b.abs()).ok_or(Error::Overflow)?;
        reduce128(l, den)
    }

    /// Exact value of a finite decimal string such as `"0.2"` or `"-1.25"`.
    fn parse_decimal(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid rational literal `{s}`"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num: i128 = digits.parse().map_err(|_| Error::Overflow)?;
        let den = 10i128.checked_pow(frac_part.len() as u32).ok_or(Error::Overflow)?;
        reduce128(if neg { -num } else { num }, den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p"`, `"p/q"` and finite decimals.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| Error::Parse(format!("invalid numerator in `{s}`")))?;
                let q: i64 = q.trim().parse().map_err(|_| Error::Parse(format!("invalid denominator in `{s}`")))?;
                Rational::new(p, q)
            }
            None => Rational::parse_decimal(s),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl std::ops::Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        // num is never i64::MIN, so negation cannot overflow
        Rational { num: -self.num, den: self.den }
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rational::integer(n)),
        }
    }
}

/// Shorthand used throughout tests and fixtures; panics on a malformed literal.
pub fn q(s: &str) -> Rational {
    s.parse().unwrap_or_else(|e| panic!("bad rational literal {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(q("2/4"), Rational::new(1, 2).unwrap());
        assert_eq!(q("0.2"), Rational::new(1, 5).unwrap());
        assert_eq!(q("-1.25"), Rational::new(-5, 4).unwrap());
        assert_eq!(q("3"), Rational::integer(3));
        assert_eq!(q("1/-3"), Rational::new(-1, 3).unwrap());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let big = Rational::integer(i64::MAX);
        assert!(matches!(big.checked_add(Rational::ONE), Err(Error::Overflow)));
        assert!(matches!(big.checked_mul(Rational::integer(2)), Err(Error::Overflow)));
        // reducible products stay representable
        let x = Rational::new(i64::MAX, 3).unwrap();
        assert_eq!(x.checked_mul(Rational::new(3, i64::MAX).unwrap()).unwrap(), Rational::ONE);
    }

    #[test]
    fn modular_helpers() {
        let (r, k) = q("-2/5").rem_euclid(q("2")).unwrap();
        assert_eq!((r, k), (q("8/5"), -1));
        assert_eq!(q("13/10").dist_to_lattice(q("4")).unwrap(), q("13/10"));
        assert_eq!(q("3").dist_to_lattice(q("4")).unwrap(), q("1"));
        assert_eq!(q("4").gcd(q("6")).unwrap(), q("2"));
        assert_eq!(q("1/2").gcd(q("1/3")).unwrap(), q("1/6"));
        assert_eq!(q("4").lcm(q("6")).unwrap(), q("12"));
        assert_eq!(q("1/2").lcm(q("1/3")).unwrap(), q("1"));
        assert_eq!(q("-7/3").floor(), -3);
        assert_eq!(q("-7/3").ceil(), -2);
        assert_eq!(q("-7/3").fract(), q("2/3"));
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/4", 3, "0.5"]"#).unwrap();
        assert_eq!(v, vec![q("1/4"), q("3"), q("1/2")]);
        assert_eq!(serde_json::to_string(&q("6/8")).unwrap(), "\"3/4\"");
    }
}
