//! Truncated power series over exact rationals.
//!
//! A [`TruncatedSeries`] of degree `d` holds the coefficients of
//! `c_0 + c_1 u + … + c_d u^d`; every operation drops terms above `u^d`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Series of degree `degree` from leading coefficients; missing ones are
    /// zero and extra ones are dropped.
    pub fn new(coeffs: impl IntoIterator<Item = Rational>, degree: usize) -> Self {
        let mut coeffs: Vec<Rational> = coeffs.into_iter().take(degree + 1).collect();
        coeffs.resize(degree + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new([], degree)
    }

    pub fn one(degree: usize) -> Self {
        Self::constant(Rational::one(), degree)
    }

    pub fn constant(c: Rational, degree: usize) -> Self {
        Self::new([c], degree)
    }

    /// `c0 + c1·u`.
    pub fn linear(c0: Rational, c1: Rational, degree: usize) -> Self {
        Self::new([c0, c1], degree)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    /// Drops to a lower truncation degree.
    pub fn truncate(&self, degree: usize) -> Self {
        assert!(degree <= self.degree(), "cannot raise truncation degree");
        Self::new(self.coeffs.iter().cloned(), degree)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x - y).collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.degree();
        let mut out = vec![Rational::zero(); d + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs[..=d - i].iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// Multiplicative inverse by forward substitution:
    /// `t_0 = 1/s_0`, `t_k = -(Σ_{i=1..k} s_i t_{k-i}) / s_0`.
    pub fn inv(&self) -> Result<Self> {
        let s0 = &self.coeffs[0];
        if s0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let d = self.degree();
        let inv0 = s0.recip();
        let mut t: Vec<Rational> = Vec::with_capacity(d + 1);
        t.push(inv0.clone());
        for k in 1..=d {
            let acc = (1..=k).fold(Rational::zero(), |acc, i| acc + &self.coeffs[i] * &t[k - i]);
            t.push(-acc * &inv0);
        }
        Ok(Self { coeffs: t })
    }

    /// `self^k` by square-and-multiply; `k = 0` gives the one-series.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.degree());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: Self) -> TruncatedSeries {
        self.try_add(rhs).expect("series degrees must match")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.try_sub(rhs).expect("series degrees must match")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.try_mul(rhs).expect("series degrees must match")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})u")?,
                _ => write!(f, "({c})u^{k}")?,
            }
        }
        write!(f, " + O(u^{})", self.degree() + 1)
    }
}

/// Binomial coefficient `C(n, k)` by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> num_bigint::BigInt {
    if k > n {
        return num_bigint::BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = num_bigint::BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
