//! Truncated formal power series over exact rationals.
//!
//! A series carries its truncation order explicitly: every value is a dense
//! coefficient vector of length order + 1 and all arithmetic truncates back
//! to the shortest operand. Floats never appear here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatSeries {
    coeffs: Vec<BigRational>,
}

impl RatSeries {
    pub fn zero(order: usize) -> Self {
        RatSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty());
        RatSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.truncate(order + 1);
        c.resize(order + 1, BigRational::zero());
        RatSeries { coeffs: c }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
            .collect();
        RatSeries { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
            .collect();
        RatSeries { coeffs }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        RatSeries { coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Self {
        assert!(!self.coeffs[0].is_zero(), "series has no inverse");
        let order = self.order();
        let mut out = vec![BigRational::zero(); order + 1];
        let c0 = self.coeffs[0].recip();
        out[0] = c0.clone();
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[n - k];
                }
            }
            out[n] = -acc * &c0;
        }
        RatSeries { coeffs: out }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|i| &self.coeffs[i] * BigRational::from(BigInt::from(i as i64)))
            .collect();
        RatSeries { coeffs }
    }

    /// Antiderivative with zero constant term; raises the order by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.order() + 2];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + 1] = c / BigRational::from(BigInt::from((i + 1) as i64));
        }
        RatSeries { coeffs }
    }

    /// log of a series with constant term 1, via integrating f'/f.
    pub fn ln(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "ln needs constant term 1");
        if self.order() == 0 {
            return Self::zero(0);
        }
        let quotient = self.derivative().div(&self.truncated(self.order() - 1));
        quotient.integrate().truncated(self.order())
    }

    /// Substitute `inner` (constant term 0) into self, by Horner evaluation.
    pub fn compose(&self, inner: &Self) -> Self {
        assert!(inner.coeffs[0].is_zero(), "composition needs inner(0) = 0");
        let order = self.order().min(inner.order());
        let inner = inner.truncated(order);
        let mut acc = Self::zero(order);
        for i in (0..=self.order().min(order)).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += &self.coeffs[i];
        }
        // terms of self above the working order cannot influence coefficients
        // at or below it since inner has valuation >= 1
        acc
    }

    /// Divide by the variable: requires a zero constant term, drops the order.
    pub fn shift_down(&self) -> Self {
        assert!(
            self.coeffs[0].is_zero(),
            "shift_down needs zero constant term"
        );
        RatSeries {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Multiply by the variable, truncating at the same order.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.order() + 1];
        for i in 1..=self.order() {
            coeffs[i] = self.coeffs[i - 1].clone();
        }
        RatSeries { coeffs }
    }
}

/// The square-exponent series 1 + 2z + 2z^4 + 2z^9 + ... as a formal series.
pub fn theta_fps(order: usize) -> RatSeries {
    let mut s = RatSeries::zero(order);
    s.coeffs[0] = BigRational::one();
    let mut k = 1usize;
    while k * k <= order {
        s.coeffs[k * k] = rat(2, 1);
        k += 1;
    }
    s
}

/// The logarithmic-derivative ratio z h'(z)/h(z) as a formal series.
pub fn saddle_ratio_fps(order: usize) -> RatSeries {
    let h = theta_fps(order + 1);
    let hp = h.derivative(); // order `order`
    hp.shift_up().div(&h.truncated(order))
}

/// Pretty-print a rational as `p/q` (or just `p` for integers).
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else if x.denom().is_negative() {
        // normalized BigRational keeps the denominator positive; just in case
        format!("{}/{}", -x.numer(), -x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
