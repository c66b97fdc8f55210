//! Fourier multipliers of the coordinate-class averaging sets.
//!
//! The multiplier of the set of points with exactly n_k coordinates equal to
//! +-k is an average of products of cosines over disjoint index tuples. The
//! evaluator below never enumerates those tuples: the sum over disjoint
//! subsets with sizes (n_1,...,n_K) is the coefficient of t_1^(n_1)...t_K^(n_K)
//! in the product of the per-coordinate linear factors
//! 1 + sum_k t_k cos(2 k pi xi_i), so one truncated-polynomial sweep over the
//! coordinates yields the whole table of values for all smaller indices at
//! once. Normalizing by the multinomial count of tuples gives the average.

use num_complex::Complex64;
use rand::Rng;

use crate::comb::multinomial;
use crate::counting::{brute_force_shell, enumerate_dnbar, MultiIndex};
use crate::error::{Error, Result};

/// A frequency point on the d-torus, components in [-1/2, 1/2).
#[derive(Clone, Debug)]
pub struct TorusPoint {
    xi: Vec<f64>,
}

impl TorusPoint {
    /// Folds each component into [-1/2, 1/2).
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::Empty("torus point needs at least one component"));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "torus components must be finite".into(),
            ));
        }
        let folded = xi
            .into_iter()
            .map(|x| {
                let mut t = x - x.round();
                if t >= 0.5 {
                    t -= 1.0;
                }
                t
            })
            .collect();
        Ok(TorusPoint { xi: folded })
    }

    pub fn uniform<R: Rng>(d: usize, rng: &mut R) -> Self {
        let xi = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
        TorusPoint { xi }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.xi
    }

    /// sum_i sin^2(k pi xi_i), the squared torus norm of the k-dilated point.
    pub fn sin2_sum(&self, k: u32) -> f64 {
        self.xi
            .iter()
            .map(|&x| (k as f64 * std::f64::consts::PI * x).sin().powi(2))
            .sum()
    }

    /// sum_i cos^2(k pi xi_i), the squared norm of the half-shifted point.
    pub fn cos2_sum(&self, k: u32) -> f64 {
        self.xi
            .iter()
            .map(|&x| (k as f64 * std::f64::consts::PI * x).cos().powi(2))
            .sum()
    }
}

fn resolve_coords(xi: &TorusPoint, j: Option<&[usize]>) -> Result<Vec<usize>> {
    match j {
        None => Ok((0..xi.dim()).collect()),
        Some(set) => {
            let mut seen = vec![false; xi.dim()];
            for &i in set {
                if i >= xi.dim() {
                    return Err(Error::IndexRange(format!(
                        "coordinate {i} out of range for dimension {}",
                        xi.dim()
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidArgument(format!("coordinate {i} repeated")));
                }
                seen[i] = true;
            }
            Ok(set.to_vec())
        }
    }
}

/// Table of multiplier values for every index below the requested caps.
#[derive(Clone, Debug)]
pub struct BetaTable {
    caps: Vec<u32>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl BetaTable {
    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn get(&self, idx: &[u32]) -> f64 {
        assert_eq!(idx.len(), self.caps.len());
        let mut flat = 0usize;
        for (k, &i) in idx.iter().enumerate() {
            assert!(i <= self.caps[k], "index exceeds table cap");
            flat += i as usize * self.strides[k];
        }
        self.values[flat]
    }
}

/// Multiplier values for every multi-index m with m_k <= nbar_k, over the
/// coordinate set `j` (all coordinates when `None`).
pub fn beta_table(nbar: &MultiIndex, xi: &TorusPoint, j: Option<&[usize]>) -> Result<BetaTable> {
    let coords = resolve_coords(xi, j)?;
    let m = coords.len() as u64;
    if !nbar.is_feasible(m) {
        return Err(Error::InfeasibleIndex {
            total: nbar.total(),
            limit: m,
        });
    }
    let caps = nbar.entries().to_vec();
    let kk = caps.len();
    let mut strides = vec![1usize; kk.max(1)];
    let mut len = 1usize;
    for k in 0..kk {
        strides[k] = len;
        len *= caps[k] as usize + 1;
    }
    let mut data = vec![0.0f64; len];
    data[0] = 1.0;
    for &i in &coords {
        let x = xi.xi[i];
        // descending sweep keeps the not-yet-updated lower entries intact
        for flat in (0..len).rev() {
            let mut add = 0.0;
            for k in 0..kk {
                let digit = (flat / strides[k]) % (caps[k] as usize + 1);
                if digit >= 1 {
                    let c = (2.0 * (k as f64 + 1.0) * std::f64::consts::PI * x).cos();
                    add += c * data[flat - strides[k]];
                }
            }
            data[flat] += add;
        }
    }
    // normalize each entry by the number of disjoint tuples of its sizes
    for flat in 0..len {
        let mut parts = Vec::with_capacity(kk);
        for k in 0..kk {
            parts.push(((flat / strides[k]) % (caps[k] as usize + 1)) as u64);
        }
        match multinomial(m, &parts) {
            Some(count) => {
                let c = crate::comb::ratio_to_f64(&num_bigint::BigUint::from(1u32), &count);
                data[flat] *= c;
            }
            None => data[flat] = 0.0, // infeasible sub-index, raw sum is empty
        }
    }
    Ok(BetaTable {
        caps,
        strides,
        values: data,
    })
}

/// A single multiplier value together with the inputs that produced it.
#[derive(Clone, Debug)]
pub struct MultiplierValue {
    pub value: f64,
    pub nbar: MultiIndex,
    pub support: Option<Vec<usize>>,
}

pub fn beta_eval(
    nbar: &MultiIndex,
    xi: &TorusPoint,
    j: Option<&[usize]>,
) -> Result<MultiplierValue> {
    let table = beta_table(nbar, xi, j)?;
    Ok(MultiplierValue {
        value: table.get(nbar.entries()),
        nbar: nbar.clone(),
        support: j.map(|s| s.to_vec()),
    })
}

const BRUTE_BETA_D_MAX: usize = 10;
const BRUTE_BETA_SUM_MAX: u64 = 4;

/// Direct average of e(x . xi) over the enumerated point set; the oracle for
/// [`beta_eval`]. Returns (real part, imaginary part); the imaginary part is
/// zero up to roundoff by the sign symmetry of the set.
pub fn beta_bruteforce(nbar: &MultiIndex, xi: &TorusPoint) -> Result<(f64, f64)> {
    let d = xi.dim();
    if d > BRUTE_BETA_D_MAX || nbar.total() > BRUTE_BETA_SUM_MAX {
        return Err(Error::Guard(
            "multiplier enumeration",
            format!(
                "d = {d} (max {BRUTE_BETA_D_MAX}), sum n_j = {} (max {BRUTE_BETA_SUM_MAX})",
                nbar.total()
            ),
        ));
    }
    let points = enumerate_dnbar(nbar, d as u32)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &points {
        let dot: f64 = p.iter().zip(&xi.xi).map(|(&a, &b)| a as f64 * b).sum();
        let phase = -2.0 * std::f64::consts::PI * dot;
        acc += Complex64::new(phase.cos(), phase.sin());
    }
    let count = points.len() as f64;
    Ok((acc.re / count, acc.im / count))
}

/// Diffusion symbol exp(-(t/d) sum_i sin^2(pi (k xi_i + eps/2))).
pub fn semigroup_symbol(k: u32, t: f64, eps: u8, xi: &TorusPoint) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time must be >= 0, got {t}"
        )));
    }
    if eps > 1 {
        return Err(Error::InvalidArgument(format!(
            "eps must be 0 or 1, got {eps}"
        )));
    }
    let d = xi.dim() as f64;
    let s = if eps == 0 {
        xi.sin2_sum(k)
    } else {
        xi.cos2_sum(k)
    };
    Ok((-t / d * s).exp())
}

/// Symmetrized symbol exp(-(t/d) min(|k xi|^2, |k xi + 1/2|^2)).
pub fn p_tilde(k: u32, t: f64, xi: &TorusPoint) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time must be >= 0, got {t}"
        )));
    }
    let d = xi.dim() as f64;
    Ok((-t / d * xi.sin2_sum(k).min(xi.cos2_sum(k))).exp())
}

/// Which parameters to difference (two steps back) and at which index.
#[derive(Clone, Debug)]
pub struct DifferenceSpec {
    pub u: Vec<usize>,
    pub nbar: MultiIndex,
}

impl DifferenceSpec {
    pub fn new(u: Vec<usize>, nbar: MultiIndex) -> Result<Self> {
        let mut seen = vec![false; nbar.k()];
        for &k in &u {
            if k >= nbar.k() {
                return Err(Error::IndexRange(format!(
                    "difference parameter {k} out of range for K = {}",
                    nbar.k()
                )));
            }
            if seen[k] {
                return Err(Error::InvalidArgument(format!("parameter {k} repeated")));
            }
            seen[k] = true;
            if nbar.entries()[k] < 2 {
                return Err(Error::InvalidArgument(format!(
                    "difference in parameter {k} needs n_{k} >= 2, got {}",
                    nbar.entries()[k]
                )));
            }
        }
        Ok(DifferenceSpec { u, nbar })
    }
}

/// Iterated two-step difference of the multiplier in the parameters of U:
/// the alternating sum of 2^|U| values at shifted indices.
pub fn delta_beta(spec: &DifferenceSpec, xi: &TorusPoint, j: Option<&[usize]>) -> Result<f64> {
    let table = beta_table(&spec.nbar, xi, j)?;
    let mut total = 0.0;
    for mask in 0..(1u32 << spec.u.len()) {
        let mut idx = spec.nbar.entries().to_vec();
        let mut sign = 1.0;
        for (pos, &k) in spec.u.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                idx[k] -= 2;
                sign = -sign;
            }
        }
        total += sign * table.get(&idx);
    }
    Ok(total)
}

/// The closed pair-sum form of [`delta_beta`]: a sum over tuples of distinct
/// coordinates weighted by sin^2 cos^2 factors times the multiplier on the
/// shrunken coordinate set at the reduced index.
pub fn delta_beta_formula(
    spec: &DifferenceSpec,
    xi: &TorusPoint,
    j: Option<&[usize]>,
) -> Result<f64> {
    let coords = resolve_coords(xi, j)?;
    let m = coords.len();
    let ulen = spec.u.len();
    if ulen == 0 {
        return Ok(beta_eval(&spec.nbar, xi, j)?.value);
    }
    if m < 2 * ulen {
        return Err(Error::InvalidArgument(format!(
            "need |J| >= 2|U|, got |J| = {m}, |U| = {ulen}"
        )));
    }
    if ulen >= 2 && m > 12 {
        return Err(Error::Guard(
            "pair-sum formula",
            format!("|J| = {m} exceeds 12 with |U| = {ulen}"),
        ));
    }
    if m > 64 {
        return Err(Error::Guard(
            "pair-sum formula",
            format!("|J| = {m} exceeds 64"),
        ));
    }
    let mut reduced = spec.nbar.entries().to_vec();
    for &k in &spec.u {
        reduced[k] -= 2;
    }
    let reduced_index = MultiIndex::new(reduced.clone());

    let mut sum = 0.0;
    let mut used = vec![false; m];
    // ordered choice of a (sin, cos) coordinate pair for each parameter in U
    fn recurse(
        depth: usize,
        spec: &DifferenceSpec,
        coords: &[usize],
        used: &mut Vec<bool>,
        weight: f64,
        xi: &TorusPoint,
        reduced_index: &MultiIndex,
        sum: &mut f64,
    ) -> Result<()> {
        if depth == spec.u.len() {
            let remaining: Vec<usize> = coords
                .iter()
                .enumerate()
                .filter(|(pos, _)| !used[*pos])
                .map(|(_, &c)| c)
                .collect();
            let table = beta_table(reduced_index, xi, Some(&remaining))?;
            *sum += weight * table.get(reduced_index.entries());
            return Ok(());
        }
        let class = (spec.u[depth] + 1) as f64;
        for xpos in 0..coords.len() {
            if used[xpos] {
                continue;
            }
            used[xpos] = true;
            let sx = (class * std::f64::consts::PI * xi.xi[coords[xpos]])
                .sin()
                .powi(2);
            for ypos in 0..coords.len() {
                if used[ypos] {
                    continue;
                }
                used[ypos] = true;
                let cy = (class * std::f64::consts::PI * xi.xi[coords[ypos]])
                    .cos()
                    .powi(2);
                recurse(
                    depth + 1,
                    spec,
                    coords,
                    used,
                    weight * sx * cy,
                    xi,
                    reduced_index,
                    sum,
                )?;
                used[ypos] = false;
            }
            used[xpos] = false;
        }
        Ok(())
    }
    recurse(
        0,
        spec,
        &coords,
        &mut used,
        1.0,
        xi,
        &reduced_index,
        &mut sum,
    )?;

    let mut prefactor = 1.0;
    for i in 0..(2 * ulen) {
        prefactor /= (m - i) as f64;
    }
    prefactor *= (-4.0f64).powi(ulen as i32);
    Ok(prefactor * sum)
}

/// The spherical multiplier split into a concentrated main part and a
/// remainder collecting points that either keep too little squared mass on
/// small coordinates or have fewer than n/2 coordinates equal to +-1.
#[derive(Clone, Debug)]
pub struct SphericalSplit {
    pub value: f64,
    pub main_part: f64,
    pub remainder: f64,
    pub imag_bound: f64,
}

pub fn spherical_symbol(
    n: usize,
    d: u32,
    xi: &TorusPoint,
    k_small: u32,
    a: usize,
) -> Result<SphericalSplit> {
    if xi.dim() != d as usize {
        return Err(Error::ShapeMismatch(format!(
            "frequency has dimension {}, expected {d}",
            xi.dim()
        )));
    }
    let shell = brute_force_shell(d, n)?;
    if shell.is_empty() {
        return Err(Error::Empty("shell has no lattice points"));
    }
    let mut main = Complex64::new(0.0, 0.0);
    let mut rem = Complex64::new(0.0, 0.0);
    for p in &shell {
        let dot: f64 = p.iter().zip(&xi.xi).map(|(&a, &b)| a as f64 * b).sum();
        let phase = -2.0 * std::f64::consts::PI * dot;
        let e = Complex64::new(phase.cos(), phase.sin());
        let small_mass: i64 = p
            .iter()
            .filter(|&&v| v.unsigned_abs() <= k_small as u64)
            .map(|&v| v * v)
            .sum();
        let ones = p.iter().filter(|&&v| v.unsigned_abs() == 1).count();
        // main part keeps small mass >= n - a and at least n/2 coordinates +-1
        if small_mass as usize + a >= n && 2 * ones >= n {
            main += e;
        } else {
            rem += e;
        }
    }
    let count = shell.len() as f64;
    main /= count;
    rem /= count;
    Ok(SphericalSplit {
        value: main.re + rem.re,
        main_part: main.re,
        remainder: rem.re,
        imag_bound: (main.im + rem.im)
            .abs()
            .max(main.im.abs())
            .max(rem.im.abs()),
    })
}
