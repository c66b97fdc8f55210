//! Saddle-point asymptotics for shell and ball counts.
//!
//! For alpha = n/d in (0,1) there is a unique r in (0,1) with
//! r h'(r)/h(r) = alpha, where h(z) = 1 + 2 sum_k z^(k^2). The count of
//! lattice points with |x|^2 = n is then comparable to h(r)^d r^(-n) / sqrt(n)
//! uniformly over the small-radius regime. Estimates live entirely in the log
//! domain; the raw value overflows any float for every interesting (n, d).
//!
//! The module also computes two exact rational coefficient families: the
//! power-series inversion r(alpha) = sum a_k alpha^k of the saddle equation,
//! and the expansion alpha^{-1} log h(r(alpha)) - log(2 r(alpha)/alpha)
//! = sum b_k alpha^k that turns the estimate into its binomial-style form.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::counting::Cap;
use crate::error::{Error, Result};
use crate::series::{rat, rational_string, theta_fps, RatSeries};

/// Numeric evaluator for h(r) = 1 + 2 sum z^(k^2) and its derivatives,
/// optionally with the coordinate cap k <= K.
#[derive(Clone, Copy, Debug)]
pub struct Theta {
    cap: Cap,
}

impl Theta {
    pub fn unbounded() -> Self {
        Theta {
            cap: Cap::Unbounded,
        }
    }

    pub fn capped(k: u32) -> Self {
        Theta {
            cap: Cap::Bounded(k),
        }
    }

    /// Largest k retained for radius r: the dropped tail is below 1e-30.
    pub fn truncation_level(&self, r: f64) -> u32 {
        let mut k = 1u32;
        loop {
            if let Cap::Bounded(cap) = self.cap {
                if k > cap {
                    return cap;
                }
            }
            // tail after dropping exponents >= k^2 is at most 2 r^(k^2)/(1-r)
            let tail = 2.0 * r.powi((k * k) as i32) / (1.0 - r);
            if tail < 1e-30 {
                return k;
            }
            k += 1;
            if k > 1_000_000 {
                return k; // r pathologically close to 1; callers reject earlier
            }
        }
    }

    /// (h, h', h'') at r in one pass. Derivatives use r^(e-1), r^(e-2)
    /// directly so the origin stays finite (h'(0) = 2, h''(0) = 0).
    pub fn with_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let top = self.truncation_level(r);
        let mut h = 1.0;
        let mut h1 = 0.0;
        let mut h2 = 0.0;
        for k in 1..=top as u64 {
            let e = (k * k) as f64;
            h += 2.0 * r.powf(e);
            h1 += 2.0 * e * r.powf(e - 1.0);
            if e >= 2.0 {
                h2 += 2.0 * e * (e - 1.0) * r.powf(e - 2.0);
            }
        }
        (h, h1, h2)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.with_derivatives(r).0
    }

    /// The saddle map r h'(r)/h(r), strictly increasing on (0,1).
    pub fn saddle_map(&self, r: f64) -> f64 {
        let (h, h1, _) = self.with_derivatives(r);
        r * h1 / h
    }
}

/// Solution of r h'(r)/h(r) = alpha together with the derived scalars used by
/// the estimators.
#[derive(Clone, Copy, Debug)]
pub struct SaddleSolution {
    pub alpha: f64,
    pub r: f64,
    pub h_at_r: f64,
    pub hprime_at_r: f64,
    /// Second derivative at the saddle of f(z) = log h(z) - alpha log z.
    pub beta_second: f64,
}

/// Unique root of r h'(r)/h(r) = alpha in (0,1): bisection on the strictly
/// monotone saddle map, polished by two Newton steps.
pub fn solve_saddle(alpha: f64) -> Result<SaddleSolution> {
    solve_saddle_for(&Theta::unbounded(), alpha)
}

pub fn solve_saddle_for(theta: &Theta, alpha: f64) -> Result<SaddleSolution> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaRange(alpha));
    }
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    while theta.saddle_map(hi) < alpha {
        lo = hi;
        hi = 0.5 * (1.0 + hi);
        if 1.0 - hi < 1e-12 {
            break;
        }
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if theta.saddle_map(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (h, h1, h2) = theta.with_derivatives(r);
        let value = r * h1 / h - alpha;
        let slope = h1 / h + r * (h2 / h - (h1 / h) * (h1 / h));
        let step = value / slope;
        if step.is_finite() {
            r -= step;
        }
    }
    let (h, h1, h2) = theta.with_derivatives(r);
    let residual = (r * h1 / h - alpha).abs();
    if residual > 1e-12 * alpha {
        return Err(Error::InvalidArgument(format!(
            "saddle solve failed to converge at alpha = {alpha}: residual {residual}"
        )));
    }
    Ok(SaddleSolution {
        alpha,
        r,
        h_at_r: h,
        hprime_at_r: h1,
        beta_second: alpha / (r * r) + h2 / h - (h1 / h) * (h1 / h),
    })
}

/// log of the saddle-point estimate h(r)^d r^(-n) n^(-1/2) for the shell
/// count; valid for 1 <= n < d.
pub fn log_estimate(n: u64, d: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let alpha = n as f64 / d as f64;
    let sol = solve_saddle(alpha)?;
    Ok(d as f64 * sol.h_at_r.ln() - n as f64 * sol.r.ln() - 0.5 * (n as f64).ln())
}

/// log of the binomial-style main term 2^n C(d, n) exp(n alpha^3 / 8).
pub fn binom_estimate(n: u64, d: u64) -> Result<f64> {
    if n == 0 || n > d {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n <= d, got n = {n}, d = {d}"
        )));
    }
    let alpha = n as f64 / d as f64;
    let mut ln_choose = 0.0f64;
    for i in 0..n {
        ln_choose += ((d - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    Ok(n as f64 * std::f64::consts::LN_2 + ln_choose + n as f64 * alpha.powi(3) / 8.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    ASeries,
    BSeries,
}

/// Exact rational coefficients of one of the two expansion families.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoefficients {
    pub kind: SeriesKind,
    pub values: Vec<BigRational>,
}

impl SeriesCoefficients {
    pub fn value_strings(&self) -> Vec<String> {
        self.values.iter().map(rational_string).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": match self.kind { SeriesKind::ASeries => "a", SeriesKind::BSeries => "b" },
            "values": self.value_strings(),
        })
    }

    pub fn to_csv(&self) -> String {
        let kind = match self.kind {
            SeriesKind::ASeries => "a",
            SeriesKind::BSeries => "b",
        };
        let start = match self.kind {
            SeriesKind::ASeries => 1usize,
            SeriesKind::BSeries => 0usize,
        };
        let mut s = String::from("kind,index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", kind, start + i, rational_string(v)));
        }
        s
    }
}

/// Inversion coefficients a_1..a_m of the saddle equation: a_k is
/// [z^(k-1)] (h/h')^k divided by k (Lagrange-Buermann form).
pub fn inversion_coeffs(m: usize) -> SeriesCoefficients {
    assert!(m >= 1);
    let order = m;
    let h = theta_fps(order + 1);
    let ratio = h.truncated(order).div(&h.derivative());
    let mut values = Vec::with_capacity(m);
    let mut power = RatSeries::one(order);
    for k in 1..=m {
        power = power.mul(&ratio);
        values.push(power.coeff(k - 1) / rat(k as i64, 1));
    }
    SeriesCoefficients {
        kind: SeriesKind::ASeries,
        values,
    }
}

/// The inversion series r(alpha) = sum_{k>=1} a_k alpha^k to the given order.
pub fn saddle_root_fps(order: usize) -> RatSeries {
    let a = inversion_coeffs(order);
    let mut coeffs = vec![BigRational::zero(); order + 1];
    for (k, v) in a.values.into_iter().enumerate() {
        coeffs[k + 1] = v;
    }
    RatSeries::from_coeffs(coeffs)
}

/// Expansion coefficients b_0..b_m of
/// alpha^{-1} log h(r(alpha)) - log(2 r(alpha)/alpha).
pub fn b_coeffs(m: usize) -> SeriesCoefficients {
    let work = m + 2;
    let r = saddle_root_fps(work);
    let h_of_r = theta_fps(work).compose(&r);
    let lnh_over_alpha = h_of_r.ln().shift_down();
    let two_r_over_alpha = r.scale(&rat(2, 1)).shift_down();
    let b = lnh_over_alpha.sub(&two_r_over_alpha.ln());
    SeriesCoefficients {
        kind: SeriesKind::BSeries,
        values: b.coeffs()[..=m].to_vec(),
    }
}

/// One row of the estimator-vs-exact comparison table.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EstimateRow {
    pub d: u64,
    pub n: u64,
    pub ln_exact: f64,
    pub ln_estimate: f64,
    pub log_ratio: f64,
}

/// Compare the log estimate with exact shell counts for n = 1..=n_max.
pub fn estimate_table(d: u32, n_max: usize) -> Result<Vec<EstimateRow>> {
    if n_max as u64 >= d as u64 {
        return Err(Error::InvalidArgument(format!(
            "estimate needs n_max < d, got n_max = {n_max}, d = {d}"
        )));
    }
    let series = crate::counting::theta_coeffs(d, n_max, Cap::Unbounded)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let ln_exact = crate::comb::ln_biguint(&series.coeffs[n]);
        let ln_estimate = log_estimate(n as u64, d as u64)?;
        rows.push(EstimateRow {
            d: d as u64,
            n: n as u64,
            ln_exact,
            ln_estimate,
            log_ratio: ln_estimate - ln_exact,
        });
    }
    Ok(rows)
}

pub fn estimate_csv(rows: &[EstimateRow]) -> String {
    let mut s = String::from("d,n,ln_exact,ln_estimate,log_ratio\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.d, r.n, r.ln_exact, r.ln_estimate, r.log_ratio
        ));
    }
    s
}

#[allow(dead_code)]
fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
