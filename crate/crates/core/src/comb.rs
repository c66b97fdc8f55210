//! Big-integer combinatorial helpers used across the crate.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Binomial coefficient C(n, k) as a big integer; 0 when k > n.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // dividing by i+1 right after multiplying keeps every step exact
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Multinomial coefficient d! / (p_1! ... p_r! (d - sum p_i)!).
/// Returns `None` when the parts do not fit into d.
pub fn multinomial(d: u64, parts: &[u64]) -> Option<BigUint> {
    let total: u64 = parts.iter().copied().sum();
    if total > d {
        return None;
    }
    let mut remaining = d;
    let mut acc = BigUint::one();
    for &p in parts {
        acc *= binomial(remaining, p);
        remaining -= p;
    }
    Some(acc)
}

/// Natural logarithm of a positive big integer, computed from its top bits.
/// Relative error is a few ulps; returns -inf for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 63 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 63;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// num/den as f64, accurate to ~1 ulp even when both exceed the f64 range.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    assert!(!den.is_zero(), "ratio_to_f64: zero denominator");
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = 64 - (nb - db);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let qf = q.to_f64().expect("quotient fits in f64 range");
    qf * 2f64.powi(-shift as i32)
}
