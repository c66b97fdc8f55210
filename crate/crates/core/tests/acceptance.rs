//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test -p spherecount --test acceptance -- --nocapture` to
//! see the lines and the reported empirical constants.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spherecount::comb::ln_biguint;
use spherecount::series::rat;
use spherecount::{
    b_coeffs, beta_bruteforce, beta_eval, brute_force_shell, check_bounds, concentration_report,
    delta_beta, delta_beta_formula, dyadic_decompose, inversion_coeffs, log_estimate, make_kernel,
    rm_check_random, theta_coeffs, uniform_bound_holds, verify_semigroup_properties, BoundSuite,
    Cap, DifferenceSpec, KernelKind, KernelSpec, MultiIndex, TorusPoint,
};

struct Criterion {
    id: u32,
    name: &'static str,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Criterion { id, name }
    }

    fn finish(&self, ok: bool, detail: String) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!(
            "[acceptance] criterion {:>2} ({}): {verdict} {detail}",
            self.id, self.name
        );
        assert!(ok, "criterion {} ({}) failed: {detail}", self.id, self.name);
    }
}

#[test]
fn criterion_01_exact_count_oracle() {
    let c = Criterion::new(1, "exact counts vs enumeration and divisor sums");
    let mut ok = true;
    for d in 1u32..=6 {
        let series = theta_coeffs(d, 25, Cap::Unbounded).unwrap();
        for n in 0..=25usize {
            let enumerated = brute_force_shell(d, n).unwrap().len() as u64;
            if series.coeffs[n] != BigUint::from(enumerated) {
                ok = false;
            }
        }
    }
    // dimension four: count equals 8 * sum of divisors not divisible by 4
    let series = theta_coeffs(4, 200, Cap::Unbounded).unwrap();
    for n in 1..=200u64 {
        let sigma: u64 = (1..=n).filter(|m| n % m == 0 && m % 4 != 0).sum();
        if series.coeffs[n as usize] != BigUint::from(8 * sigma) {
            ok = false;
        }
    }
    c.finish(
        ok,
        "d <= 6, n <= 25 enumerated; divisor identity to n = 200".into(),
    );
}

#[test]
fn criterion_02_ternary_identity() {
    let c = Criterion::new(2, "capped shell counts equal 2^n C(d,n)");
    let mut ok = true;
    for d in 1u32..=30 {
        let series = theta_coeffs(d, d as usize, Cap::Bounded(1)).unwrap();
        for n in 0..=d as usize {
            let expect =
                (BigUint::from(1u32) << n) * spherecount::comb::binomial(d as u64, n as u64);
            if series.coeffs[n] != expect {
                ok = false;
            }
        }
    }
    c.finish(ok, "exact equality for all d <= 30, n <= d".into());
}

#[test]
fn criterion_03_saddle_estimator() {
    let c = Criterion::new(3, "log estimate within ln 10 of exact counts");
    let budget = std::f64::consts::LN_10;
    let mut ok = true;
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = f64::NEG_INFINITY;
    for d in [200u32, 500, 1000, 2000] {
        let n_max = d as usize / 20;
        let series = theta_coeffs(d, n_max, Cap::Unbounded).unwrap();
        let mut ball = BigUint::from(1u32); // n = 0 shell
        for n in 1..=n_max {
            ball += &series.coeffs[n];
            let est = log_estimate(n as u64, d as u64).unwrap();
            let gap_sphere = est - ln_biguint(&series.coeffs[n]);
            let gap_ball = est - ln_biguint(&ball);
            if gap_sphere.abs() > budget || gap_ball.abs() > budget {
                ok = false;
            }
            worst_lo = worst_lo.min(gap_sphere).min(gap_ball);
            worst_hi = worst_hi.max(gap_sphere).max(gap_ball);
        }
    }
    c.finish(
        ok,
        format!(
            "log-ratio range over the grid: [{worst_lo:.4}, {worst_hi:.4}], budget ±{budget:.4}"
        ),
    );
}

#[test]
fn criterion_04_series_coefficients() {
    let c = Criterion::new(4, "exact inversion and expansion coefficients");
    let a = inversion_coeffs(4);
    let b = b_coeffs(3);
    let ok = a.values == vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 4)]
        && b.values == vec![rat(1, 1), rat(-1, 2), rat(-1, 6), rat(1, 24)]
        && (&b.values[3] + rat(1, 12)) == rat(1, 8);
    c.finish(
        ok,
        "a = (1/2,1/2,1/2,1/4); b = (1,-1/2,-1/6,1/24); b3 + 1/12 = 1/8".into(),
    );
}

#[test]
fn criterion_05_krawtchouk_properties() {
    let c = Criterion::new(5, "krawtchouk symmetry, reflection, bound, difference");
    let mut ok = true;
    let mut bound_checks = 0u64;
    for n in 0u64..=60 {
        // precompute rows once per n
        let rows: Vec<Vec<num_rational::BigRational>> = (0..=n)
            .map(|k| spherecount::kr_row(k, n).unwrap())
            .collect();
        for k in 0..=n as usize {
            for x in 0..=n as usize {
                // symmetry
                if rows[k][x] != rows[x][k] {
                    ok = false;
                }
                // reflection
                let signed = if k % 2 == 0 {
                    rows[k][x].clone()
                } else {
                    -rows[k][x].clone()
                };
                if rows[k][n as usize - x] != signed {
                    ok = false;
                }
            }
        }
        // uniform bound on the quarter box
        for k in 0..=(n / 2) {
            for x in 0..=(n / 2) {
                bound_checks += 1;
                if !uniform_bound_holds(k, n, x).unwrap() {
                    ok = false;
                }
            }
        }
        // two-step difference identity
        if n >= 2 {
            let prev: Vec<Vec<num_rational::BigRational>> = (0..=(n - 2))
                .map(|k| spherecount::kr_row(k, n - 2).unwrap())
                .collect();
            for k in 0..=(n - 2) as usize {
                for x in 0..=n as usize {
                    let lhs = rows[k + 2][x].clone() - rows[k][x].clone();
                    let rhs = if x == 0 || x == n as usize {
                        rat(0, 1)
                    } else {
                        let factor =
                            rat(-4 * x as i64 * (n as i64 - x as i64), (n * (n - 1)) as i64);
                        factor * prev[k][x - 1].clone()
                    };
                    if lhs != rhs {
                        ok = false;
                    }
                }
            }
        }
    }
    c.finish(
        ok,
        format!("all n <= 60 exact; uniform bound exact-rational on {bound_checks} points"),
    );
}

#[test]
fn criterion_06_multiplier_equivalence() {
    let c = Criterion::new(
        6,
        "multiplier DP vs enumeration; difference pair-sum identity",
    );
    let mut ok = true;
    let mut worst_beta = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for _ in 0..200 {
        let d = rng.gen_range(2..=8usize);
        let k = rng.gen_range(1..=2usize);
        let mut entries = vec![0u32; k];
        let mut left = rng.gen_range(0..=4u32.min(d as u32));
        for e in entries.iter_mut() {
            let take = rng.gen_range(0..=left);
            *e = take;
            left -= take;
        }
        let nbar = MultiIndex::new(entries);
        let xi = TorusPoint::uniform(d, &mut rng);
        let fast = beta_eval(&nbar, &xi, None).unwrap().value;
        let (slow, im) = beta_bruteforce(&nbar, &xi).unwrap();
        let diff = (fast - slow).abs();
        worst_beta = worst_beta.max(diff);
        if diff > 1e-10 || im.abs() > 1e-12 {
            ok = false;
        }
    }
    let mut worst_delta = 0.0f64;
    for trial in 0..200 {
        let two_param = trial % 3 == 0;
        let (d, spec) = if two_param {
            let d = rng.gen_range(8..=12usize);
            (
                d,
                DifferenceSpec::new(vec![0, 1], MultiIndex::new(vec![2, rng.gen_range(2..=3)]))
                    .unwrap(),
            )
        } else {
            let d = rng.gen_range(5..=12usize);
            (
                d,
                DifferenceSpec::new(
                    vec![0],
                    MultiIndex::new(vec![rng.gen_range(2..=4), rng.gen_range(0..=1)]),
                )
                .unwrap(),
            )
        };
        let xi = TorusPoint::uniform(d, &mut rng);
        let a = delta_beta(&spec, &xi, None).unwrap();
        let b = delta_beta_formula(&spec, &xi, None).unwrap();
        let diff = (a - b).abs();
        worst_delta = worst_delta.max(diff);
        if diff > 1e-10 {
            ok = false;
        }
    }
    c.finish(
        ok,
        format!("200 + 200 seeded instances; worst gaps {worst_beta:.2e} and {worst_delta:.2e}"),
    );
}

#[test]
fn criterion_07_bound_suites() {
    let c = Criterion::new(
        7,
        "explicit-constant suites clean; fitted constants reported",
    );
    let dyadic = check_bounds(BoundSuite::DyadicMinSum, 10_000, 0).unwrap();
    let envelope = check_bounds(BoundSuite::BetaEnvelope, 500, 700).unwrap();
    let subsets = check_bounds(BoundSuite::SubsetAverage, 500, 700).unwrap();
    let semi = check_bounds(BoundSuite::SemigroupApprox, 500, 700).unwrap();
    let diff = check_bounds(BoundSuite::DifferenceEnvelope, 500, 700).unwrap();
    let ok = dyadic.violations == 0
        && envelope.violations == 0
        && subsets.violations == 0
        && semi.violations == 0; // zero-case exactness inside the fitted suite
    c.finish(
        ok,
        format!(
            "violations: dyadic {} envelope {} subsets {}; fitted: semigroup-approx {:.3} difference-envelope {:.3}",
            dyadic.violations,
            envelope.violations,
            subsets.violations,
            semi.fitted_constant.unwrap(),
            diff.fitted_constant.unwrap(),
        ),
    );
}

#[test]
fn criterion_08_concentration() {
    let c = Criterion::new(
        8,
        "concentration exact at small d; fraction halves with dimension",
    );
    let mut ok = true;
    // exact agreement with enumeration at small dimension
    for (d, n, k, a) in [(4u32, 12usize, 1u32, 3usize), (5, 10, 2, 2), (6, 9, 2, 4)] {
        let report = concentration_report(d, n, k, a).unwrap();
        let mut small = 0u64;
        let mut few = 0u64;
        let points = brute_force_shell(d, n).unwrap();
        for p in &points {
            let small_mass: i64 = p
                .iter()
                .filter(|&&v| v.unsigned_abs() <= k as u64)
                .map(|&v| v * v)
                .sum();
            if small_mass as usize + a <= n {
                small += 1;
            }
            if 2 * p.iter().filter(|&&v| v.unsigned_abs() == 1).count() <= n {
                few += 1;
            }
        }
        if report.shell_total != BigUint::from(points.len() as u64)
            || report.small_mass_violations != BigUint::from(small)
            || report.few_ones_violations != BigUint::from(few)
        {
            ok = false;
        }
    }
    // decay in the dimension at fixed (n, K, a)
    let mut ratios = Vec::new();
    for d in [500u32, 1000, 2000] {
        let lo = concentration_report(d, 20, 2, 5).unwrap();
        let hi = concentration_report(2 * d, 20, 2, 5).unwrap();
        if lo.small_mass_violations.is_zero() {
            ok = false;
            continue;
        }
        let ratio = hi.small_mass_fraction / lo.small_mass_fraction;
        ratios.push(format!("{d}->{}: {ratio:.4}", 2 * d));
        if !(ratio <= 0.75) {
            ok = false;
        }
    }
    c.finish(
        ok,
        format!("doubling ratios {} (need <= 0.75)", ratios.join(", ")),
    );
}

#[test]
fn criterion_09_torus_simulator() {
    let c = Criterion::new(9, "torus semigroup structure, kernel spectra, norm ratios");
    let mut ok = true;
    // structural checks across the small grid
    for d in 1usize..=3 {
        for m in [8usize, 16] {
            for k in [1u32, 2] {
                let report = verify_semigroup_properties(k, &[0.5, 2.0, 7.0], d, m, 900).unwrap();
                if !report.pass {
                    ok = false;
                    eprintln!("semigroup structure failed: {report:?}");
                }
            }
        }
    }
    // kernel spectra match the multiplier evaluator at grid frequencies
    for (d, m, entries) in [
        (2usize, 8usize, vec![1u32]),
        (3, 8, vec![1, 1]),
        (2, 16, vec![2]),
    ] {
        let nbar = MultiIndex::new(entries);
        let spec = KernelSpec {
            kind: KernelKind::Dbar { nbar: nbar.clone() },
            d,
            m,
        };
        let spectrum = make_kernel(&spec).unwrap().dft();
        for flat in 0..spectrum.values().len() {
            let q = spectrum.coords(flat);
            let xi = TorusPoint::new(q.iter().map(|&x| x as f64 / m as f64).collect()).unwrap();
            let expect = beta_eval(&nbar, &xi, None).unwrap().value;
            let got = spectrum.values()[flat];
            if (got.re - expect).abs() > 1e-10 || got.im.abs() > 1e-10 {
                ok = false;
            }
        }
    }
    // empirical norm ratios across dimensions; constants here are measured,
    // not certified: dimension-free behavior is out of reach at grid scale
    let mut trend = Vec::new();
    for d in 1usize..=4 {
        let m = 8usize;
        let ns: &[usize] = match d {
            1 => &[0, 1, 4],
            2 => &[0, 1, 2, 4],
            _ => &[0, 1, 2, 3, 4],
        };
        let specs: Vec<KernelSpec> = ns
            .iter()
            .map(|&n| KernelSpec {
                kind: KernelKind::Sphere { n },
                d,
                m,
            })
            .collect();
        let report = spherecount::empirical_norm_ratio(&specs, 10, 901).unwrap();
        if report.max_ratio > ns.len() as f64 + 1e-9 {
            ok = false;
        }
        trend.push(format!("d={d}: {:.4}", report.max_ratio));
    }
    c.finish(
        ok,
        format!(
            "ratios {} (empirical lower bounds only; no dimension-free claim checked)",
            trend.join(", ")
        ),
    );
}

#[test]
fn criterion_10_rademacher_menshov() {
    let c = Criterion::new(
        10,
        "dyadic decomposition exhaustive; one-parameter constant",
    );
    let mut ok = true;
    let s = 10u32;
    let mut intervals = 0u64;
    for n in (0..(1u64 << s)).step_by(2) {
        for k in ((n + 2)..=(1u64 << s)).step_by(2) {
            intervals += 1;
            let d = dyadic_decompose(n, k, s).unwrap();
            if d.validate(s).is_err() {
                ok = false;
            }
        }
    }
    let s1 = 5u32;
    let report = rm_check_random(&[s1], &[1 << s1], 100, 1000).unwrap();
    let cap = 2f64.sqrt() * s1 as f64 + 1.0;
    if !(report.fitted_constant <= cap) {
        ok = false;
    }
    c.finish(
        ok,
        format!(
            "{intervals} intervals validated; fitted constant {:.4} <= {cap:.4}",
            report.fitted_constant
        ),
    );
}
