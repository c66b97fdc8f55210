//! Finite-torus simulation of the averaging operators.
//!
//! Functions live on (Z/MZ)^d as dense complex arrays; operators are circular
//! convolutions applied spectrally. Point-set kernels (spheres, coordinate
//! class sets) embed without aliasing as long as M exceeds twice the largest
//! support coordinate, so every multiplier identity on Z^d becomes an exact
//! finite DFT identity at the grid frequencies.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::counting::{brute_force_shell, enumerate_dnbar, MultiIndex};
use crate::error::{Error, Result};

/// A complex-valued function on the torus (Z/MZ)^d, stored row-major with the
/// first coordinate fastest.
#[derive(Clone, Debug)]
pub struct TorusFunction {
    d: usize,
    m: usize,
    values: Vec<Complex64>,
}

impl TorusFunction {
    pub fn zero(d: usize, m: usize) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidArgument("need d >= 1 and M >= 1".into()));
        }
        let len = m.checked_pow(d as u32).ok_or_else(|| {
            Error::Guard("torus size", format!("M^d overflows for M = {m}, d = {d}"))
        })?;
        if len > 1 << 24 {
            return Err(Error::Guard(
                "torus size",
                format!("M^d = {len} exceeds 2^24 points"),
            ));
        }
        Ok(TorusFunction {
            d,
            m,
            values: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn delta(d: usize, m: usize) -> Result<Self> {
        let mut f = Self::zero(d, m)?;
        f.values[0] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn constant(d: usize, m: usize, c: Complex64) -> Result<Self> {
        let mut f = Self::zero(d, m)?;
        f.values.fill(c);
        Ok(f)
    }

    /// White complex Gaussian noise normalized to unit l2 norm.
    pub fn random_unit<R: Rng>(d: usize, m: usize, rng: &mut R) -> Result<Self> {
        let mut f = Self::zero(d, m)?;
        for v in f.values.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *v = Complex64::new(re, im);
        }
        let n = f.norm_l2();
        for v in f.values.iter_mut() {
            *v /= n;
        }
        Ok(f)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.d);
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &i in idx {
            flat += (i % self.m) * stride;
            stride *= self.m;
        }
        flat
    }

    /// Decode a flat index into grid coordinates.
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.d];
        for slot in idx.iter_mut() {
            *slot = flat % self.m;
            flat /= self.m;
        }
        idx
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    fn transform(&self, inverse: bool) -> TorusFunction {
        let mut out = self.clone();
        let mut planner = FftPlanner::new();
        let fft = if inverse {
            planner.plan_fft_inverse(self.m)
        } else {
            planner.plan_fft_forward(self.m)
        };
        let mut line = vec![Complex64::new(0.0, 0.0); self.m];
        let total = self.values.len();
        for axis in 0..self.d {
            let stride = self.m.pow(axis as u32);
            let block = stride * self.m;
            let mut base = 0usize;
            while base < total {
                for lo in base..base + stride {
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = out.values[lo + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, &v) in line.iter().enumerate() {
                        out.values[lo + j * stride] = v;
                    }
                }
                base += block;
            }
        }
        if inverse {
            let scale = 1.0 / total as f64;
            for v in out.values.iter_mut() {
                *v *= scale;
            }
        }
        out
    }

    /// DFT matching the e(s) = exp(-2 pi i s) convention: the value at grid
    /// point q is the multiplier symbol at frequency q/M.
    pub fn dft(&self) -> TorusFunction {
        self.transform(false)
    }

    pub fn idft(&self) -> TorusFunction {
        self.transform(true)
    }
}

/// Kernel selector for [`make_kernel`].
#[derive(Clone, Debug)]
pub enum KernelKind {
    /// Normalized counting measure on the shell |x|^2 = n.
    Sphere {
        n: usize,
    },
    /// Normalized counting measure on the coordinate-class set of nbar.
    Dbar {
        nbar: MultiIndex,
    },
    /// Diffusion kernel with symbol exp(-(t/d) sum sin^2(pi(k xi_i + eps/2))).
    Semigroup {
        k: u32,
        t: f64,
        eps: u8,
    },
    Identity,
}

#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub d: usize,
    pub m: usize,
}

impl KernelSpec {
    pub fn describe(&self) -> String {
        match &self.kind {
            KernelKind::Sphere { n } => format!("sphere:{n}"),
            KernelKind::Dbar { nbar } => format!("dbar:{nbar}"),
            KernelKind::Semigroup { k, t, eps } => format!("semigroup:{k}:{t}:{eps}"),
            KernelKind::Identity => "identity".into(),
        }
    }
}

/// Build the kernel of a spec. Point-set kernels fold their support into the
/// torus and insist on M large enough that distinct points stay distinct.
pub fn make_kernel(spec: &KernelSpec) -> Result<TorusFunction> {
    let d = spec.d;
    let m = spec.m;
    match &spec.kind {
        KernelKind::Identity => TorusFunction::delta(d, m),
        KernelKind::Sphere { n } => {
            let max_coord = (*n as f64).sqrt() as usize;
            if m <= 2 * max_coord {
                return Err(Error::Guard(
                    "kernel embedding",
                    format!("M = {m} must exceed 2*{max_coord} for squared radius {n}"),
                ));
            }
            let points = brute_force_shell(d as u32, *n)?;
            if points.is_empty() {
                return Err(Error::Empty("shell has no lattice points"));
            }
            point_mass_kernel(d, m, &points)
        }
        KernelKind::Dbar { nbar } => {
            let k = nbar.k();
            if m <= 2 * k {
                return Err(Error::Guard(
                    "kernel embedding",
                    format!("M = {m} must exceed 2K = {}", 2 * k),
                ));
            }
            let points = enumerate_dnbar(nbar, d as u32)?;
            point_mass_kernel(d, m, &points)
        }
        KernelKind::Semigroup { k, t, eps } => {
            if *t < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "time must be >= 0, got {t}"
                )));
            }
            if *eps > 1 {
                return Err(Error::InvalidArgument(format!(
                    "eps must be 0 or 1, got {eps}"
                )));
            }
            let mut symbol = TorusFunction::zero(d, m)?;
            let total = symbol.values.len();
            for flat in 0..total {
                let idx = symbol.coords(flat);
                let mut s = 0.0f64;
                for &q in &idx {
                    let angle = *k as f64 * std::f64::consts::PI * q as f64 / m as f64
                        + *eps as f64 * std::f64::consts::FRAC_PI_2;
                    s += angle.sin().powi(2);
                }
                symbol.values[flat] = Complex64::new((-t / d as f64 * s).exp(), 0.0);
            }
            Ok(symbol.idft())
        }
    }
}

fn point_mass_kernel(d: usize, m: usize, points: &[Vec<i64>]) -> Result<TorusFunction> {
    let mut kernel = TorusFunction::zero(d, m)?;
    let mass = 1.0 / points.len() as f64;
    for p in points {
        let idx: Vec<usize> = p
            .iter()
            .map(|&v| (v.rem_euclid(m as i64)) as usize)
            .collect();
        let flat = kernel.flat_index(&idx);
        kernel.values[flat] += Complex64::new(mass, 0.0);
    }
    Ok(kernel)
}

/// Circular convolution kernel * f, computed spectrally.
pub fn apply(kernel: &TorusFunction, f: &TorusFunction) -> Result<TorusFunction> {
    if kernel.d != f.d || kernel.m != f.m {
        return Err(Error::ShapeMismatch(format!(
            "kernel is {}^{}, function is {}^{}",
            kernel.m, kernel.d, f.m, f.d
        )));
    }
    let mut kf = kernel.dft();
    let ff = f.dft();
    for (a, b) in kf.values.iter_mut().zip(&ff.values) {
        *a *= b;
    }
    Ok(kf.idft())
}

/// Pointwise supremum of |kernel_i * f| over the family; real and nonnegative.
pub fn maximal_function(family: &[TorusFunction], f: &TorusFunction) -> Result<TorusFunction> {
    if family.is_empty() {
        return Err(Error::Empty("maximal function needs at least one kernel"));
    }
    let mut out = TorusFunction::zero(f.d, f.m)?;
    for kernel in family {
        let conv = apply(kernel, f)?;
        for (slot, v) in out.values.iter_mut().zip(&conv.values) {
            let mag = v.norm();
            if mag > slot.re {
                *slot = Complex64::new(mag, 0.0);
            }
        }
    }
    Ok(out)
}

/// Empirical l2 ratios of the maximal function over random unit-norm inputs.
/// This is a lower bound on the operator norm measured at one grid size, not
/// a verification of any dimension-free constant.
#[derive(Clone, Debug, Serialize)]
pub struct NormRatioReport {
    pub family: Vec<String>,
    pub d: usize,
    pub m: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub seed: u64,
    pub interpretation: String,
}

impl NormRatioReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,m,trials,max_ratio,mean_ratio,seed\n");
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            self.d, self.m, self.trials, self.max_ratio, self.mean_ratio, self.seed
        ));
        s
    }
}

pub fn empirical_norm_ratio(
    specs: &[KernelSpec],
    trials: usize,
    seed: u64,
) -> Result<NormRatioReport> {
    if specs.is_empty() {
        return Err(Error::Empty("empty kernel family"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let d = specs[0].d;
    let m = specs[0].m;
    if specs.iter().any(|s| s.d != d || s.m != m) {
        return Err(Error::ShapeMismatch(
            "kernel family mixes grid shapes".into(),
        ));
    }
    let family: Vec<TorusFunction> = specs.iter().map(make_kernel).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut total = 0.0f64;
    for _ in 0..trials {
        let f = TorusFunction::random_unit(d, m, &mut rng)?;
        let ratio = maximal_function(&family, &f)?.norm_l2();
        max_ratio = max_ratio.max(ratio);
        total += ratio;
    }
    Ok(NormRatioReport {
        family: specs.iter().map(|s| s.describe()).collect(),
        d,
        m,
        trials,
        max_ratio,
        mean_ratio: total / trials as f64,
        seed,
        interpretation: "empirical lower bound on the operator norm at one grid size; \
                         dimension-free behavior is not verifiable at this scale"
            .into(),
    })
}

/// Structural checks of the diffusion family at grid resolution.
#[derive(Clone, Debug, Serialize)]
pub struct SemigroupReport {
    pub k: u32,
    pub d: usize,
    pub m: usize,
    pub t_grid: Vec<f64>,
    /// Most negative kernel value of the eps = 0 family (analytically >= 0).
    pub positivity_min: f64,
    /// Largest pointwise excess of |P_{k,t,1} f| over P_{k,t,0}|f|.
    pub domination_excess: f64,
    /// Largest relative error of p_s p_t against p_{s+t} on the grid.
    pub symbol_product_error: f64,
    /// Largest pointwise error of the two-step against the one-step operator.
    pub semigroup_law_error: f64,
    pub pass: bool,
}

pub const POSITIVITY_FLOOR: f64 = -1e-12;
pub const DOMINATION_SLACK: f64 = 1e-10;
pub const SYMBOL_PRODUCT_TOL: f64 = 1e-13;
pub const SEMIGROUP_LAW_TOL: f64 = 1e-10;

pub fn verify_semigroup_properties(
    k: u32,
    t_grid: &[f64],
    d: usize,
    m: usize,
    seed: u64,
) -> Result<SemigroupReport> {
    if t_grid.is_empty() {
        return Err(Error::Empty("empty time grid"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positivity_min = f64::INFINITY;
    let mut domination_excess = f64::NEG_INFINITY;
    let mut symbol_product_error = 0.0f64;
    let mut law_error = 0.0f64;

    let symbol_at = |t: f64, eps: u8, idx: &[usize]| -> f64 {
        let mut s = 0.0f64;
        for &q in idx {
            let angle = k as f64 * std::f64::consts::PI * q as f64 / m as f64
                + eps as f64 * std::f64::consts::FRAC_PI_2;
            s += angle.sin().powi(2);
        }
        (-t / d as f64 * s).exp()
    };

    for &t in t_grid {
        let spec0 = KernelSpec {
            kind: KernelKind::Semigroup { k, t, eps: 0 },
            d,
            m,
        };
        let spec1 = KernelSpec {
            kind: KernelKind::Semigroup { k, t, eps: 1 },
            d,
            m,
        };
        let k0 = make_kernel(&spec0)?;
        let k1 = make_kernel(&spec1)?;
        for v in k0.values() {
            positivity_min = positivity_min.min(v.re);
        }

        let f = TorusFunction::random_unit(d, m, &mut rng)?;
        let mut f_abs = TorusFunction::zero(d, m)?;
        for (slot, v) in f_abs.values_mut().iter_mut().zip(f.values()) {
            *slot = Complex64::new(v.norm(), 0.0);
        }
        let lhs = apply(&k1, &f)?;
        let rhs = apply(&k0, &f_abs)?;
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            domination_excess = domination_excess.max(a.norm() - b.re);
        }

        // symbol multiplicativity and the operator-level two-step law
        for &s in t_grid {
            let probe = TorusFunction::zero(d, m)?;
            for flat in 0..probe.values().len() {
                let idx = probe.coords(flat);
                let left = symbol_at(s, 0, &idx) * symbol_at(t, 0, &idx);
                let right = symbol_at(s + t, 0, &idx);
                let err = (left - right).abs() / right.max(f64::MIN_POSITIVE);
                symbol_product_error = symbol_product_error.max(err);
            }
            let spec_s = KernelSpec {
                kind: KernelKind::Semigroup { k, t: s, eps: 0 },
                d,
                m,
            };
            let spec_st = KernelSpec {
                kind: KernelKind::Semigroup {
                    k,
                    t: s + t,
                    eps: 0,
                },
                d,
                m,
            };
            let ks = make_kernel(&spec_s)?;
            let kst = make_kernel(&spec_st)?;
            let two_step = apply(&ks, &apply(&k0, &f)?)?;
            let one_step = apply(&kst, &f)?;
            for (a, b) in two_step.values().iter().zip(one_step.values()) {
                law_error = law_error.max((a - b).norm());
            }
        }
    }

    let pass = positivity_min >= POSITIVITY_FLOOR
        && domination_excess <= DOMINATION_SLACK
        && symbol_product_error <= SYMBOL_PRODUCT_TOL
        && law_error <= SEMIGROUP_LAW_TOL;
    Ok(SemigroupReport {
        k,
        d,
        m,
        t_grid: t_grid.to_vec(),
        positivity_min,
        domination_excess,
        symbol_product_error,
        semigroup_law_error: law_error,
        pass,
    })
}
