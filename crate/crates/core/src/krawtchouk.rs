//! Krawtchouk polynomials over exact rationals.
//!
//! kr_k^(n)(x) = C(n,k)^{-1} sum_j (-1)^j C(x,j) C(n-x,k-j), evaluated from
//! the definition with big-integer binomials. Float evaluation would lose the
//! cancellations that the symmetry and difference identities rely on, so the
//! values stay rational end to end.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::comb::binomial;
use crate::error::{Error, Result};

fn check_range(k: u64, n: u64, x: u64) -> Result<()> {
    if k > n || x > n {
        return Err(Error::IndexRange(format!(
            "krawtchouk needs 0 <= k, x <= n; got k = {k}, x = {x}, n = {n}"
        )));
    }
    Ok(())
}

/// Exact value of the k-th Krawtchouk polynomial of order n at x.
pub fn kr(k: u64, n: u64, x: u64) -> Result<BigRational> {
    check_range(k, n, x)?;
    let mut num = BigInt::zero();
    for j in 0..=k {
        let term = BigInt::from(binomial(x, j) * binomial(n - x, k - j));
        if j % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    Ok(BigRational::new(num, BigInt::from(binomial(n, k))))
}

/// kr(k, n, x) for x = 0..=n.
pub fn kr_row(k: u64, n: u64) -> Result<Vec<BigRational>> {
    (0..=n).map(|x| kr(k, n, x)).collect()
}

/// The uniform-bound decay rate: -2 log 0.93, a hair above 0.145.
pub fn uniform_bound_c() -> f64 {
    -2.0 * 0.93f64.ln()
}

/// Exact test of |kr_k^(n)(x)| <= exp(-c k x / n) with c = -2 log 0.93.
///
/// Raising both sides to the n-th power turns the right side into the
/// rational (93/100)^(2kx), so the comparison needs no floating point at all:
/// |p|^n * 100^(2kx) <= q^n * 93^(2kx).
pub fn uniform_bound_holds(k: u64, n: u64, x: u64) -> Result<bool> {
    check_range(k, n, x)?;
    if n == 0 {
        return Ok(true); // kr(0,0,0) = 1 and the bound is 1
    }
    let v = kr(k, n, x)?;
    let p = v.numer().abs().to_biguint().expect("abs is nonnegative");
    let q = v.denom().to_biguint().expect("denominator positive");
    let e = 2 * k * x;
    let lhs = p.pow(n as u32) * BigUint::from(100u32).pow(e as u32);
    let rhs = q.pow(n as u32) * BigUint::from(93u32).pow(e as u32);
    Ok(lhs <= rhs)
}
