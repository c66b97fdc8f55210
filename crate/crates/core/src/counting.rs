//! Exact lattice point counting.
//!
//! The generating function for shell counts is the d-th power of the one
//! dimensional square-exponent series 1 + 2*sum_k z^(k^2): its coefficient of
//! z^n is the number of x in Z^d with |x|^2 = n. Everything here works with
//! truncated dense polynomials over big integers, so every count is exact.
//! A coordinate cap K replaces the full series by 1 + 2*sum_{k<=K} z^(k^2),
//! which counts points of {-K,...,K}^d instead.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::comb::{binomial, multinomial, ratio_to_f64};
use crate::error::{Error, Result};

/// Coordinate cap for the one dimensional series: either |x_i| <= K or no cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cap {
    Bounded(u32),
    Unbounded,
}

impl Cap {
    fn limit(self, fallback: u32) -> u32 {
        match self {
            Cap::Bounded(k) => k.min(fallback),
            Cap::Unbounded => fallback,
        }
    }
}

/// Tuple (n_1, ..., n_K) of coordinate-class multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex { entries }
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Sum of the entries, i.e. how many coordinates the index occupies.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&x| x as u64).sum()
    }

    pub fn is_feasible(&self, d: u64) -> bool {
        self.total() <= d
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Truncated coefficients of the d-th power series: `coeffs[n]` is the number
/// of x in the (possibly capped) lattice cube with |x|^2 = n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSeries {
    pub d: u32,
    pub k_cap: Cap,
    pub coeffs: Vec<BigUint>,
}

impl CoefficientSeries {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }
}

type Poly = Vec<BigUint>;

fn isqrt(n: usize) -> u32 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n as u64 {
        r += 1;
    }
    while r * r > n as u64 {
        r -= 1;
    }
    r as u32
}

fn poly_one(n_max: usize) -> Poly {
    let mut p = vec![BigUint::zero(); n_max + 1];
    p[0] = BigUint::one();
    p
}

/// 1 + 2*sum z^(k^2) over 1 <= k, k^2 <= n_max, k <= cap.
fn square_base_poly(n_max: usize, cap: Cap) -> Poly {
    let mut p = vec![BigUint::zero(); n_max + 1];
    p[0] = BigUint::one();
    let limit = cap.limit(isqrt(n_max));
    for k in 1..=limit as usize {
        p[k * k] = BigUint::from(2u32);
    }
    p
}

/// Same base polynomial with the +-1 terms removed (used to tally how many
/// coordinates of a shell point equal +-1).
fn square_base_poly_no_ones(n_max: usize) -> Poly {
    let mut p = square_base_poly(n_max, Cap::Unbounded);
    if n_max >= 1 {
        p[1] = BigUint::zero();
    }
    p
}

fn poly_mul_trunc(a: &Poly, b: &Poly, n_max: usize) -> Poly {
    let mut out = vec![BigUint::zero(); n_max + 1];
    for (i, ai) in a.iter().enumerate().take(n_max + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n_max + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_pow_trunc(base: &Poly, mut exp: u64, n_max: usize) -> Poly {
    let mut result = poly_one(n_max);
    let mut sq = base.clone();
    sq.truncate(n_max + 1);
    sq.resize(n_max + 1, BigUint::zero());
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mul_trunc(&result, &sq, n_max);
        }
        exp >>= 1;
        if exp > 0 {
            sq = poly_mul_trunc(&sq, &sq, n_max);
        }
    }
    result
}

const SERIES_N_MAX: usize = 5000;

fn check_series_args(d: u32, n_max: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if n_max > SERIES_N_MAX {
        return Err(Error::Guard(
            "series truncation",
            format!("n_max = {n_max} exceeds {SERIES_N_MAX}"),
        ));
    }
    Ok(())
}

/// Exact shell counts up to order `n_max`: `coeffs[n]` is the number of
/// x in Z^d (coordinates capped by `k_cap`) with x_1^2 + ... + x_d^2 = n.
pub fn theta_coeffs(d: u32, n_max: usize, k_cap: Cap) -> Result<CoefficientSeries> {
    check_series_args(d, n_max)?;
    let base = square_base_poly(n_max, k_cap);
    let coeffs = poly_pow_trunc(&base, d as u64, n_max);
    Ok(CoefficientSeries { d, k_cap, coeffs })
}

/// Number of lattice points on the sphere of squared radius n in Z^d.
pub fn sphere_count(d: u32, n: usize) -> Result<BigUint> {
    let series = theta_coeffs(d, n, Cap::Unbounded)?;
    Ok(series.coeffs[n].clone())
}

/// Number of lattice points in the closed ball of squared radius n in Z^d.
pub fn ball_count(d: u32, n: usize) -> Result<BigUint> {
    let series = theta_coeffs(d, n, Cap::Unbounded)?;
    Ok(series.coeffs.iter().sum())
}

/// Size of the set of x in {-K,...,K}^d with exactly n_j coordinates equal
/// to +-j for each j: 2^(sum n_j) times a multinomial coefficient.
pub fn d_count(nbar: &MultiIndex, d: u64) -> Result<BigUint> {
    if !nbar.is_feasible(d) {
        return Err(Error::InfeasibleIndex {
            total: nbar.total(),
            limit: d,
        });
    }
    let parts: Vec<u64> = nbar.entries().iter().map(|&x| x as u64).collect();
    let m = multinomial(d, &parts).expect("feasibility checked");
    Ok((BigUint::one() << nbar.total()) * m)
}

const BRUTE_D_MAX: u32 = 8;
const BRUTE_N_MAX: usize = 30;

/// Every x in Z^d with |x|^2 = n, by bounded coordinate recursion.
/// Deliberately guarded: this is the enumeration oracle, not a fast path.
pub fn brute_force_shell(d: u32, n: usize) -> Result<Vec<Vec<i64>>> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    if d > BRUTE_D_MAX || n > BRUTE_N_MAX {
        return Err(Error::Guard(
            "brute force enumeration",
            format!("d = {d} (max {BRUTE_D_MAX}), n = {n} (max {BRUTE_N_MAX})"),
        ));
    }
    let mut out = Vec::new();
    let mut point = vec![0i64; d as usize];
    fn recurse(point: &mut Vec<i64>, idx: usize, remaining: i64, out: &mut Vec<Vec<i64>>) {
        if idx == point.len() {
            if remaining == 0 {
                out.push(point.clone());
            }
            return;
        }
        if idx == point.len() - 1 {
            let r = (remaining as f64).sqrt().round() as i64;
            if r * r == remaining {
                if r == 0 {
                    point[idx] = 0;
                    out.push(point.clone());
                } else {
                    for v in [-r, r] {
                        point[idx] = v;
                        out.push(point.clone());
                    }
                }
                point[idx] = 0;
            }
            return;
        }
        let bound = (remaining as f64).sqrt() as i64 + 1;
        for v in -bound..=bound {
            let sq = v * v;
            if sq <= remaining {
                point[idx] = v;
                recurse(point, idx + 1, remaining - sq, out);
            }
        }
        point[idx] = 0;
    }
    recurse(&mut point, 0, n as i64, &mut out);
    Ok(out)
}

/// Explicit enumeration of the set behind [`d_count`]: points of {-K,...,K}^d
/// with exactly n_j coordinates equal to +-j.
pub fn enumerate_dnbar(nbar: &MultiIndex, d: u32) -> Result<Vec<Vec<i64>>> {
    if !nbar.is_feasible(d as u64) {
        return Err(Error::InfeasibleIndex {
            total: nbar.total(),
            limit: d as u64,
        });
    }
    if d > 16 || nbar.total() > 8 {
        return Err(Error::Guard(
            "multi-index enumeration",
            format!("d = {d} (max 16), sum n_j = {} (max 8)", nbar.total()),
        ));
    }
    let mut out = Vec::new();
    let mut point = vec![0i64; d as usize];
    // choose positions class by class, then walk sign patterns
    fn place(
        class: usize,
        nbar: &[u32],
        start: usize,
        left: u32,
        point: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if left == 0 {
            if class + 1 < nbar.len() {
                place(class + 1, nbar, 0, nbar[class + 1], point, out);
            } else {
                out.push(point.clone());
            }
            return;
        }
        for i in start..point.len() {
            if point[i] != 0 {
                continue;
            }
            let v = (class + 1) as i64;
            for s in [v, -v] {
                point[i] = s;
                place(class, nbar, i + 1, left - 1, point, out);
            }
            point[i] = 0;
        }
    }
    if nbar.k() == 0 || nbar.total() == 0 {
        // only the points with no marked coordinates: all remaining zero
        out.push(point);
        return Ok(out);
    }
    place(
        0,
        nbar.entries(),
        0,
        nbar.entries()[0],
        &mut point,
        &mut out,
    );
    Ok(out)
}

/// Concentration statistics for the shell of squared radius n in Z^d.
///
/// `small_mass_violations` counts shell points whose squared mass on the
/// coordinates of magnitude <= K is at most n - a; `few_ones_violations`
/// counts shell points with at most n/2 coordinates equal to +-1. Both are
/// computed by coefficient extraction, never by enumeration.
#[derive(Clone, Debug)]
pub struct ConcentrationReport {
    pub d: u32,
    pub n: usize,
    pub k_small: u32,
    pub a: usize,
    pub shell_total: BigUint,
    pub small_mass_violations: BigUint,
    pub few_ones_violations: BigUint,
    pub small_mass_fraction: f64,
    pub few_ones_fraction: f64,
}

impl ConcentrationReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "d": self.d,
            "n": self.n,
            "K": self.k_small,
            "a": self.a,
            "shell_total": self.shell_total.to_string(),
            "small_mass_violations": self.small_mass_violations.to_string(),
            "few_ones_violations": self.few_ones_violations.to_string(),
            "small_mass_fraction": self.small_mass_fraction,
            "few_ones_fraction": self.few_ones_fraction,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "d,n,K,a,shell_total,small_mass_violations,few_ones_violations,small_mass_fraction,few_ones_fraction\n",
        );
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.d,
            self.n,
            self.k_small,
            self.a,
            self.shell_total,
            self.small_mass_violations,
            self.few_ones_violations,
            self.small_mass_fraction,
            self.few_ones_fraction,
        ));
        s
    }
}

pub fn concentration_report(
    d: u32,
    n: usize,
    k_small: u32,
    a: usize,
) -> Result<ConcentrationReport> {
    check_series_args(d, n)?;
    if k_small == 0 {
        return Err(Error::InvalidArgument(
            "coordinate cap K must be >= 1".into(),
        ));
    }
    let shell_total = sphere_count(d, n)?;

    // Split each coordinate into a "small" branch (|x_i| <= K) and a "large"
    // branch (|x_i| > K). A point with j large coordinates of squared mass
    // n - s and small mass s is counted by
    //   C(d, j) * [w^(n-s)] g(w)^j * [z^s] h_K(z)^(d-j),
    // where g(w) = 2 * sum_{k > K} w^(k^2). Small-mass violations sum this
    // over s <= n - a.
    let cap_all = isqrt(n);
    let hk = square_base_poly(n, Cap::Bounded(k_small));
    let mut g = vec![BigUint::zero(); n + 1];
    for k in (k_small + 1)..=cap_all {
        g[(k * k) as usize] = BigUint::from(2u32);
    }
    let step = (k_small as usize + 1) * (k_small as usize + 1);
    let j_max = if step > n {
        0
    } else {
        (n / step).min(d as usize)
    };

    // h_K^(d-j) for j = 0..=j_max, built upward from the smallest exponent
    let mut hk_pows: Vec<Poly> = vec![Vec::new(); j_max + 1];
    hk_pows[j_max] = poly_pow_trunc(&hk, d as u64 - j_max as u64, n);
    for j in (0..j_max).rev() {
        hk_pows[j] = poly_mul_trunc(&hk_pows[j + 1], &hk, n);
    }

    let mut small_mass_violations = BigUint::zero();
    let mut g_pow = poly_one(n);
    for j in 0..=j_max {
        let choose = binomial(d as u64, j as u64);
        for (deg, coef) in g_pow.iter().enumerate() {
            if coef.is_zero() || deg < a {
                continue;
            }
            let s = n - deg; // small mass; deg >= a means s <= n - a
            small_mass_violations += &choose * coef * &hk_pows[j][s];
        }
        if j < j_max {
            g_pow = poly_mul_trunc(&g_pow, &g, n);
        }
    }

    // Tally of coordinates equal to +-1: a point with exactly t such
    // coordinates is counted by C(d, t) * 2^t * [z^(n-t)] q(z)^(d-t) with q
    // the square series missing its z^1 term. Violations have 2t <= n.
    // One binary power at the smallest exponent, then multiply q back in.
    let q = square_base_poly_no_ones(n);
    let mut few_ones_violations = BigUint::zero();
    let t_top = (n / 2).min(d as usize).min(n);
    let mut q_pow = poly_pow_trunc(&q, d as u64 - t_top as u64, n);
    for t in (0..=t_top).rev() {
        few_ones_violations +=
            binomial(d as u64, t as u64) * (BigUint::one() << t) * &q_pow[n - t];
        if t > 0 {
            q_pow = poly_mul_trunc(&q_pow, &q, n);
        }
    }

    let small_mass_fraction = if shell_total.is_zero() {
        0.0
    } else {
        ratio_to_f64(&small_mass_violations, &shell_total)
    };
    let few_ones_fraction = if shell_total.is_zero() {
        0.0
    } else {
        ratio_to_f64(&few_ones_violations, &shell_total)
    };

    Ok(ConcentrationReport {
        d,
        n,
        k_small,
        a,
        shell_total,
        small_mass_violations,
        few_ones_violations,
        small_mass_fraction,
        few_ones_fraction,
    })
}

/// Count table emitted by the CLI: shell counts for n = 0..=n_max.
#[derive(Clone, Debug)]
pub struct CountTable {
    pub d: u32,
    pub counts: Vec<BigUint>,
}

impl CountTable {
    pub fn new(d: u32, n_max: usize) -> Result<Self> {
        let series = theta_coeffs(d, n_max, Cap::Unbounded)?;
        Ok(CountTable {
            d,
            counts: series.coeffs,
        })
    }

    /// Big counts serialize as decimal strings; no numeric JSON type holds them.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "d": self.d,
            "counts": self.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,n,count\n");
        for (n, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.d, n, c));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn one_dimensional_series_is_square_indicator() {
        let s = theta_coeffs(1, 10, Cap::Unbounded).unwrap();
        let expect: Vec<BigUint> = [1u64, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0]
            .iter()
            .map(|&x| big(x))
            .collect();
        assert_eq!(s.coeffs, expect);
    }

    #[test]
    fn four_dim_shell_two() {
        let s = theta_coeffs(4, 2, Cap::Unbounded).unwrap();
        assert_eq!(s.coeffs[2], big(24));
        // brute force agrees
        assert_eq!(brute_force_shell(4, 2).unwrap().len(), 24);
    }

    #[test]
    fn capped_series_three_dims() {
        let s = theta_coeffs(3, 2, Cap::Bounded(1)).unwrap();
        assert_eq!(s.coeffs[2], big(12));
    }

    #[test]
    fn coeffs_start_at_one() {
        for d in [1u32, 2, 7, 40] {
            let s = theta_coeffs(d, 3, Cap::Unbounded).unwrap();
            assert_eq!(s.coeffs[0], big(1));
        }
    }

    #[test]
    fn cap_saturates_at_sqrt_of_truncation() {
        // caps at or above floor(sqrt(N)) cannot change any retained coefficient
        let full = theta_coeffs(4, 17, Cap::Unbounded).unwrap();
        let saturated = theta_coeffs(4, 17, Cap::Bounded(4)).unwrap();
        assert_eq!(full.coeffs, saturated.coeffs);
    }

    #[test]
    fn coeffs_monotone_in_cap() {
        let d = 5;
        let n = 20;
        let capped1 = theta_coeffs(d, n, Cap::Bounded(1)).unwrap();
        let capped2 = theta_coeffs(d, n, Cap::Bounded(2)).unwrap();
        let full = theta_coeffs(d, n, Cap::Unbounded).unwrap();
        for i in 0..=n {
            assert!(capped1.coeffs[i] <= capped2.coeffs[i]);
            assert!(capped2.coeffs[i] <= full.coeffs[i]);
        }
    }

    #[test]
    fn sphere_count_examples() {
        assert_eq!(sphere_count(3, 0).unwrap(), big(1));
        assert_eq!(sphere_count(1, 4).unwrap(), big(2));
        // frozen from the enumeration oracle: (+-5,0),(0,+-5),(+-3,+-4),(+-4,+-3)
        assert_eq!(sphere_count(2, 25).unwrap(), big(12));
        assert_eq!(brute_force_shell(2, 25).unwrap().len(), 12);
    }

    #[test]
    fn ball_count_examples() {
        assert_eq!(ball_count(6, 0).unwrap(), big(1));
        assert_eq!(ball_count(2, 2).unwrap(), big(9));
        assert_eq!(ball_count(4, 1).unwrap(), big(9));
    }

    #[test]
    fn ball_count_nondecreasing() {
        let mut prev = BigUint::zero();
        for n in 0..12 {
            let b = ball_count(3, n).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn d_count_examples() {
        assert_eq!(d_count(&MultiIndex::new(vec![0, 0]), 5).unwrap(), big(1));
        assert_eq!(d_count(&MultiIndex::new(vec![1]), 3).unwrap(), big(6));
        assert_eq!(d_count(&MultiIndex::new(vec![1, 1]), 4).unwrap(), big(48));
        assert!(d_count(&MultiIndex::new(vec![3, 3]), 4).is_err());
    }

    #[test]
    fn dnbar_enumeration_matches_count() {
        for (entries, d) in [
            (vec![1u32], 3u32),
            (vec![1, 1], 4),
            (vec![2], 5),
            (vec![0, 2], 4),
        ] {
            let nbar = MultiIndex::new(entries);
            let pts = enumerate_dnbar(&nbar, d).unwrap();
            assert_eq!(big(pts.len() as u64), d_count(&nbar, d as u64).unwrap());
            // every point matches its class signature
            for p in &pts {
                for (j, &nj) in nbar.entries().iter().enumerate() {
                    let hits = p
                        .iter()
                        .filter(|&&v| v.unsigned_abs() == (j + 1) as u64)
                        .count();
                    assert_eq!(hits as u32, nj);
                }
            }
        }
    }

    #[test]
    fn brute_force_guards() {
        assert!(brute_force_shell(9, 1).is_err());
        assert!(brute_force_shell(2, 31).is_err());
    }

    #[test]
    fn brute_force_small_examples() {
        let pts = brute_force_shell(2, 1).unwrap();
        assert_eq!(pts.len(), 4);
        let pts = brute_force_shell(3, 0).unwrap();
        assert_eq!(pts, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn concentration_trivial_cases() {
        // a = 0: every shell point has small mass <= n
        let r = concentration_report(5, 7, 2, 0).unwrap();
        assert_eq!(r.small_mass_violations, r.shell_total);
        assert!((r.small_mass_fraction - 1.0).abs() < 1e-15);
        // condition unsatisfiable when a = n + 1 and no coordinate can exceed K
        let r = concentration_report(5, 4, 2, 5).unwrap();
        assert!(r.small_mass_violations.is_zero());
        assert_eq!(r.small_mass_fraction, 0.0);
    }

    #[test]
    fn concentration_matches_enumeration() {
        // d = 6, n = 9, K = 2, a = 4, checked coordinate by coordinate
        let d = 6u32;
        let n = 9usize;
        let k = 2u32;
        let a = 4usize;
        let r = concentration_report(d, n, k, a).unwrap();
        let pts = brute_force_shell(d, n).unwrap();
        let mut small = 0u64;
        let mut few = 0u64;
        for p in &pts {
            let small_mass: i64 = p
                .iter()
                .filter(|&&v| v.unsigned_abs() <= k as u64)
                .map(|&v| v * v)
                .sum();
            if small_mass as usize + a <= n {
                small += 1;
            }
            let ones = p.iter().filter(|&&v| v.unsigned_abs() == 1).count();
            if 2 * ones <= n {
                few += 1;
            }
        }
        assert_eq!(r.shell_total, big(pts.len() as u64));
        assert_eq!(r.small_mass_violations, big(small));
        assert_eq!(r.few_ones_violations, big(few));
        // frozen values from the oracle run
        assert_eq!(r.shell_total, big(876));
        assert_eq!(r.small_mass_violations, big(12));
        assert_eq!(r.few_ones_violations, big(492));
    }

    #[test]
    fn count_table_json_shape() {
        let t = CountTable::new(4, 2).unwrap();
        assert_eq!(
            t.to_json().to_string(),
            r#"{"d":4,"counts":["1","8","24"]}"#
        );
        assert_eq!(t.to_csv(), "d,n,count\n4,0,1\n4,1,8\n4,2,24\n");
    }

    #[test]
    fn rejects_zero_dimension() {
        assert!(theta_coeffs(0, 3, Cap::Unbounded).is_err());
    }
}
