//! The tridiagonal matrix `D_{ab} = 2δ_{ab} - δ_{a+1,b} - δ_{a,b+1}`,
//! a, b = 1..m.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Q;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DMatrix {
    pub size_m: usize,
}

impl DMatrix {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::Domain("D matrix needs m >= 1".into()));
        }
        Ok(Self { size_m: m })
    }

    /// Entry with 1-based indices.
    pub fn entry(&self, a: usize, b: usize) -> i64 {
        if a == b {
            2
        } else if a + 1 == b || b + 1 == a {
            -1
        } else {
            0
        }
    }

    pub fn dense(&self) -> Vec<Vec<i64>> {
        let m = self.size_m;
        (1..=m).map(|a| (1..=m).map(|b| self.entry(a, b)).collect()).collect()
    }

    /// Integer numerator `N_{ab}` with `D^{-1} = N/(m+1)`.
    pub fn inverse_numerator(&self, a: usize, b: usize) -> i64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (lo * (self.size_m - hi + 1)) as i64
    }

    /// True when `D · N = (m+1) I` holds exactly.
    pub fn inverse_is_exact(&self) -> bool {
        let m = self.size_m;
        let det = (m + 1) as i64;
        for a in 1..=m {
            for b in 1..=m {
                let lo = a.saturating_sub(1).max(1);
                let hi = (a + 1).min(m);
                let s: i64 = (lo..=hi).map(|c| self.entry(a, c) * self.inverse_numerator(c, b)).sum();
                if s != if a == b { det } else { 0 } {
                    return false;
                }
            }
        }
        true
    }
}

/// `det D = m + 1`.
pub fn d_det(m: usize) -> Result<BigInt> {
    DMatrix::new(m)?;
    Ok(BigInt::from(m + 1))
}

/// `D^{-1}_{ab} = min(a,b)(m - max(a,b) + 1)/(m + 1)`, 1-based.
pub fn d_inverse_entry(m: usize, a: usize, b: usize) -> Result<Q> {
    let d = DMatrix::new(m)?;
    if a < 1 || b < 1 || a > m || b > m {
        return Err(Error::IndexOutOfRange(format!("D^-1 index ({a}, {b}) outside 1..={m}")));
    }
    Ok(Q::new(BigInt::from(d.inverse_numerator(a, b)), BigInt::from(m + 1)))
}

/// Fraction-free Gaussian elimination on an integer matrix.
pub fn bareiss_determinant(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                let (qv, r) = v.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = qv;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
