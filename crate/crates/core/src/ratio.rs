//! Exact nonnegative rationals for expansion parameters and approximation
//! thresholds. All comparisons go through cross-multiplication in `u128`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Ratio {
    num: u128,
    den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = gcd(num, den).max(1);
        Ok(Ratio { num: num / g, den: den / g })
    }

    pub fn integer(v: u128) -> Ratio {
        Ratio { num: v, den: 1 }
    }

    pub fn zero() -> Ratio {
        Ratio { num: 0, den: 1 }
    }

    pub fn one() -> Ratio {
        Ratio { num: 1, den: 1 }
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_mul(&self, other: &Ratio) -> Result<Ratio> {
        // reduce crosswise first to keep intermediates small
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or_else(|| Error::Overflow("ratio multiply".into()))?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or_else(|| Error::Overflow("ratio multiply".into()))?;
        Ratio::new(num, den)
    }

    pub fn checked_add(&self, other: &Ratio) -> Result<Ratio> {
        let g = gcd(self.den, other.den).max(1);
        let l = self.den / g;
        let ovf = || Error::Overflow("ratio add".into());
        let den = l.checked_mul(other.den).ok_or_else(ovf)?;
        let a = self.num.checked_mul(other.den / g).ok_or_else(ovf)?;
        let b = other.num.checked_mul(l).ok_or_else(ovf)?;
        Ratio::new(a.checked_add(b).ok_or_else(ovf)?, den)
    }

    pub fn mul_int(&self, k: u128) -> Result<Ratio> {
        self.checked_mul(&Ratio::integer(k))
    }

    /// `self * x`, rounded up to an integer.
    pub fn ceil_mul(&self, x: u128) -> Result<u128> {
        let p = self
            .num
            .checked_mul(x)
            .ok_or_else(|| Error::Overflow("ratio ceil".into()))?;
        Ok(p.div_ceil(self.den))
    }

    pub fn floor(&self) -> u128 {
        self.num / self.den
    }

    pub fn ceil(&self) -> u128 {
        self.num.div_ceil(self.den)
    }

    /// `lhs >= self * rhs` without rounding.
    pub fn scaled_le(&self, rhs: u128, lhs: u128) -> bool {
        match (lhs.checked_mul(self.den), self.num.checked_mul(rhs)) {
            (Some(a), Some(b)) => a >= b,
            _ => {
                // fall back to wide comparison via f64 only on overflow of u128,
                // which cannot happen for weights bounded by the graph ceiling
                (lhs as f64) * (self.den as f64) >= (self.num as f64) * (rhs as f64)
            }
        }
    }

    /// `a / b < self` with `b > 0`.
    pub fn exceeds_fraction(&self, a: u128, b: u128) -> bool {
        !self.scaled_le(b, a)
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.num.checked_mul(other.den), other.num.checked_mul(self.den)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `p/q`, plain integers, and finite decimals like `0.25`.
impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ratio> {
        let bad = || Error::InvalidArgument(format!("not a nonnegative rational: {s:?}"));
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: u128 = p.trim().parse().map_err(|_| bad())?;
            let q: u128 = q.trim().parse().map_err(|_| bad())?;
            return Ratio::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u128 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let den = 10u128.pow(frac.len() as u32);
            let f: u128 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            return Ratio::new(int * den + f, den);
        }
        Ok(Ratio::integer(s.parse().map_err(|_| bad())?))
    }
}
