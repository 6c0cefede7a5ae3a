//! Exact rational and dyadic values.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact, always-reduced rational number with a positive denominator.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3/8"`, `"0.375"`, `"1e-3"`-free decimals or plain integers exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidDistribution(format!("cannot parse {s:?} as an exact rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
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
    let mantissa: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(mantissa, scale);
    Ok(if negative { -value } else { value })
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to log-scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// log2 of a positive rational, robust to numerators and denominators beyond f64 range.
pub fn log2_rational(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}

fn log2_bigint(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().abs().log2();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// A number `mantissa * 2^-exponent`, kept normalized (odd mantissa, or zero with exponent 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: u32) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Dyadic::new(BigInt::one(), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && self.mantissa.is_even() {
            self.mantissa >>= 1u32;
            self.exponent -= 1;
        }
    }

    /// Midpoint of `[self, other]`; always dyadic.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &other.mantissa << (e - other.exponent);
        Dyadic::new(a + b, e + 1)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.exponent)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &other.mantissa << (e - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}
