//! Exact rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `-0.25`, `3`, `1/3` or `1.5e-2` exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::InvalidArgument(format!("not an exact rational: `{s}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, body) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

pub fn to_f64(v: &Q) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

/// `re + i·im` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GQ {
    pub re: Q,
    pub im: Q,
}

impl GQ {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn imag(im: Q) -> Self {
        Self { re: Q::zero(), im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Q::one())
    }

    pub fn i() -> Self {
        Self::imag(Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        Self::new(&self.re / &n, -&self.im / &n)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

impl fmt::Display for GQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Add for &GQ {
    type Output = GQ;
    fn add(self, o: &GQ) -> GQ {
        GQ::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Add for GQ {
    type Output = GQ;
    fn add(self, o: GQ) -> GQ {
        &self + &o
    }
}

impl AddAssign<&GQ> for GQ {
    fn add_assign(&mut self, o: &GQ) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl Sub for &GQ {
    type Output = GQ;
    fn sub(self, o: &GQ) -> GQ {
        GQ::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Sub for GQ {
    type Output = GQ;
    fn sub(self, o: GQ) -> GQ {
        &self - &o
    }
}

impl Mul for &GQ {
    type Output = GQ;
    fn mul(self, o: &GQ) -> GQ {
        GQ::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Mul for GQ {
    type Output = GQ;
    fn mul(self, o: GQ) -> GQ {
        &self * &o
    }
}

impl Neg for GQ {
    type Output = GQ;
    fn neg(self) -> GQ {
        GQ::new(-self.re, -self.im)
    }
}

impl std::iter::Sum for GQ {
    fn sum<I: Iterator<Item = GQ>>(iter: I) -> GQ {
        iter.fold(GQ::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimals_exactly() {
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("0").unwrap(), qi(0));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("1.5e-2").unwrap(), q(3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), qi(2000));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("-").is_err());
    }

    #[test]
    fn gaussian_arithmetic() {
        let a = GQ::new(q(1, 2), q(3, 1));
        let b = GQ::new(q(-2, 1), q(1, 3));
        let p = &a * &b;
        assert_eq!(p, GQ::new(q(-1, 1) - q(1, 1), q(1, 6) - q(6, 1)));
        assert_eq!(&(&a * &a.inv()), &GQ::one());
        assert_eq!(GQ::i() * GQ::i(), -GQ::one());
        assert_eq!(format!("{}", GQ::new(q(1, 2), q(-3, 4))), "1/2-3/4i");
    }
}
