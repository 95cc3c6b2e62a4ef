//! Exact rational helpers shared by every module.
//!
//! Approximation values (Ψ(H), bounds, θ entries) are `f64`. Whenever a strict
//! or non-strict inequality against such a value has to be decided exactly,
//! the `f64` is read as the dyadic rational it denotes.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact value of a finite `f64`.
pub fn from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| {
        crate::error::Error::InvalidInput(format!("non-finite value {v}"))
    })
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 only fails for huge magnitudes
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"-0.125"` or
/// `"3e-4"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return invalid("empty rational literal");
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| crate::error::Error::InvalidInput(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| crate::error::Error::InvalidInput(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return invalid(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || crate::error::Error::InvalidInput(format!("bad rational literal {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let mut num: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    if negative {
        num = -num;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Largest multiple of `2^-bits` not exceeding `q`.
pub fn truncate_bits(q: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    Rational::new(scaled, scale)
}

/// `sqrt(q)` truncated to `bits` fractional bits (floor).
pub fn sqrt_truncated(q: &Rational, bits: u32) -> Result<Rational> {
    if q.is_negative() {
        return invalid("square root of a negative rational");
    }
    // floor(sqrt(q * 4^bits)) / 2^bits
    let scaled = (q.numer() << (2 * bits as usize)) / q.denom();
    let root = scaled.sqrt();
    Ok(Rational::new(root, BigInt::one() << bits))
}

/// `|value| < bound` decided exactly, `bound` read as a dyadic rational.
pub fn abs_lt(value: &Rational, bound: f64) -> bool {
    cmp_abs(value, bound) == Ordering::Less
}

/// `|value| <= bound` decided exactly.
pub fn abs_le(value: &Rational, bound: f64) -> bool {
    cmp_abs(value, bound) != Ordering::Greater
}

pub fn cmp_abs(value: &Rational, bound: f64) -> Ordering {
    if bound.is_nan() {
        return Ordering::Greater;
    }
    if bound == f64::INFINITY {
        return Ordering::Less;
    }
    if bound < 0.0 {
        return Ordering::Greater;
    }
    let b = Rational::from_float(bound).expect("finite bound");
    value.abs().cmp(&b)
}

/// Compares `|num / den|` with `bound` for integer numerator and positive
/// denominator, without building a rational.
pub fn cmp_abs_ratio(num: &BigInt, den: &BigInt, bound: f64) -> Ordering {
    debug_assert!(den.sign() == Sign::Plus);
    if bound == f64::INFINITY {
        return Ordering::Less;
    }
    if bound.is_nan() || bound < 0.0 {
        return Ordering::Greater;
    }
    if bound == 0.0 {
        return if num.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Greater
        };
    }
    let (mantissa, exponent) = decompose(bound);
    // |num| / den  vs  mantissa * 2^exponent
    let lhs = num.abs();
    let rhs = den * BigInt::from(mantissa);
    if exponent >= 0 {
        lhs.cmp(&(rhs << exponent as usize))
    } else {
        (lhs << (-exponent) as usize).cmp(&rhs)
    }
}

/// Splits a positive finite `f64` into `mantissa * 2^exponent`.
fn decompose(v: f64) -> (u64, i64) {
    let bits = v.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for t in iter {
            acc.add(t);
        }
        acc
    }
}

/// A point of `U = U_1 × … × U_m`, one exact rational per coordinate.
///
/// Irrational points are represented by rational truncations; every claim
/// made about a point is about the rational actually stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_f64s(coords: &[f64]) -> Result<Self> {
        coords.iter().map(|&c| from_f64(c)).collect::<Result<Vec<_>>>().map(Point)
    }

    /// Comma-separated rationals, e.g. `"1/3,0.25"`.
    pub fn parse(s: &str) -> Result<Self> {
        s.split(',').map(parse_rational).collect::<Result<Vec<_>>>().map(Point)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_rational("25e-2").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn dyadic_comparisons_are_exact() {
        let third = ratio(1, 3);
        let t = 1.0 / 3.0;
        // the f64 nearest 1/3 is slightly below it
        assert!(!abs_lt(&third, t));
        assert!(abs_lt(&third, 0.34));
        assert!(abs_le(&ratio(1, 4), 0.25));
        assert!(!abs_lt(&ratio(-1, 4), 0.25));
        assert_eq!(cmp_abs_ratio(&BigInt::from(-1), &BigInt::from(4), 0.25), Ordering::Equal);
        assert_eq!(cmp_abs_ratio(&BigInt::from(1), &BigInt::from(3), t), Ordering::Greater);
        assert_eq!(cmp_abs_ratio(&BigInt::from(0), &BigInt::from(3), 0.0), Ordering::Equal);
        assert_eq!(cmp_abs_ratio(&BigInt::from(3), &BigInt::from(1), 1e300), Ordering::Less);
        assert_eq!(cmp_abs_ratio(&BigInt::from(1), &BigInt::from(1), 5e-324), Ordering::Greater);
    }

    #[test]
    fn sqrt_truncation_brackets_the_root() {
        let r = sqrt_truncated(&int(2), 100).unwrap();
        let step = Rational::new(BigInt::one(), BigInt::one() << 100usize);
        assert!(&r * &r <= int(2));
        let up = &r + &step;
        assert!(&up * &up > int(2));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 10.0);
    }

    #[test]
    fn truncation_is_floor() {
        assert_eq!(truncate_bits(&ratio(1, 3), 2), ratio(1, 4));
        assert_eq!(truncate_bits(&ratio(-1, 3), 2), ratio(-1, 2));
    }
}
