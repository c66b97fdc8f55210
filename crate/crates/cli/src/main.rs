//! Command line front end: one subcommand per library operation, with CSV or
//! JSON output. Randomized subcommands take a --seed and echo it in the
//! output, so identical invocations produce identical bytes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use spherecount::{
    b_coeffs, check_bounds, concentration_report, estimate_table, inversion_coeffs, kr, kr_row,
    rm_check_random, BoundSuite, Cap, CountTable, KernelKind, KernelSpec, MultiIndex, TorusPoint,
};

#[derive(Parser)]
#[command(
    name = "spherecount",
    version,
    about = "Lattice point counts on discrete spheres and the operators built from them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this path instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact shell counts for n = 0..=nmax
    Count {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        nmax: usize,
        /// Cap coordinates at |x_i| <= K instead of counting all of Z^d
        #[arg(long = "K")]
        k_cap: Option<u32>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Saddle-point log estimates against exact counts for n = 1..=nmax,
    /// or a single saddle solve with --alpha
    Estimate {
        #[arg(long, required_unless_present = "alpha", conflicts_with = "alpha")]
        d: Option<u32>,
        #[arg(long, required_unless_present = "alpha", conflicts_with = "alpha")]
        nmax: Option<usize>,
        /// Solve the saddle equation at this ratio and print the solution
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact rational expansion coefficients (kind a: saddle inversion, kind b: log expansion)
    Coeffs {
        #[arg(long, value_parser = ["a", "b"])]
        kind: String,
        #[arg(long)]
        terms: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Krawtchouk polynomial values as exact rationals
    Krawtchouk {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// Single evaluation point; omit for the whole row x = 0..=n
        #[arg(long)]
        x: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Multiplier values at seeded random frequencies, with the enumeration
    /// oracle alongside when feasible
    Beta {
        #[arg(long)]
        d: usize,
        /// Comma separated multiplicities n_1,...,n_K
        #[arg(long)]
        nbar: String,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized inequality suites (hard constants asserted, others fitted)
    Bounds {
        /// One of: beta-envelope, semigroup-approx, dyadic-min-sum,
        /// subset-average, difference-envelope
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact concentration statistics of a shell
    Concentration {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k_small: u32,
        #[arg(long)]
        a: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical maximal-function norm ratios on a finite torus
    Simulate {
        #[arg(long)]
        d: usize,
        /// Torus side length
        #[arg(long = "M", alias = "m", default_value_t = 16)]
        m: usize,
        /// Kernel specs: sphere:<n>, dbar:<n1+n2+...>, semigroup:<k>:<t>:<eps>,
        /// identity (repeat the flag to grow the family)
        #[arg(long, required = true)]
        family: Vec<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fitted constants of the multi-parameter maximal inequality on random
    /// sequences
    RmCheck {
        /// Comma separated dyadic depths s_1,...,s_K
        #[arg(long)]
        sbar: String,
        /// Comma separated index caps m_1,...,m_K (default 2^s_j)
        #[arg(long)]
        mbar: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("bad {what} entry `{p}`"))
        })
        .collect()
}

fn parse_kernel_spec(s: &str, d: usize, m: usize) -> Result<KernelSpec, String> {
    let kind = if s == "identity" {
        KernelKind::Identity
    } else if let Some(rest) = s.strip_prefix("sphere:") {
        let n = rest.parse().map_err(|_| format!("bad sphere spec `{s}`"))?;
        KernelKind::Sphere { n }
    } else if let Some(rest) = s.strip_prefix("dbar:") {
        let entries: Result<Vec<u32>, _> = rest.split('+').map(|p| p.parse()).collect();
        let entries = entries.map_err(|_| format!("bad dbar spec `{s}`"))?;
        KernelKind::Dbar {
            nbar: MultiIndex::new(entries),
        }
    } else if let Some(rest) = s.strip_prefix("semigroup:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!(
                "bad semigroup spec `{s}`, want semigroup:<k>:<t>:<eps>"
            ));
        }
        KernelKind::Semigroup {
            k: parts[0].parse().map_err(|_| format!("bad k in `{s}`"))?,
            t: parts[1].parse().map_err(|_| format!("bad t in `{s}`"))?,
            eps: parts[2].parse().map_err(|_| format!("bad eps in `{s}`"))?,
        }
    } else {
        return Err(format!("unknown kernel spec `{s}`"));
    };
    Ok(KernelSpec { kind, d, m })
}

fn emit(output: &OutputArgs, text: String) -> Result<(), String> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("write failed: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Count {
            d,
            nmax,
            k_cap,
            output,
        } => {
            let cap = k_cap.map_or(Cap::Unbounded, Cap::Bounded);
            let series = spherecount::theta_coeffs(d, nmax, cap).map_err(|e| e.to_string())?;
            let table = CountTable {
                d,
                counts: series.coeffs,
            };
            let text = match output.format {
                Format::Csv => table.to_csv(),
                Format::Json => format!("{}\n", table.to_json()),
            };
            emit(&output, text)
        }
        Cmd::Estimate {
            d,
            nmax,
            alpha,
            output,
        } => {
            if let Some(alpha) = alpha {
                let sol = spherecount::solve_saddle(alpha).map_err(|e| e.to_string())?;
                let text = match output.format {
                    Format::Csv => format!(
                        "alpha,r,h_at_r,hprime_at_r,beta_second\n{},{},{},{},{}\n",
                        sol.alpha, sol.r, sol.h_at_r, sol.hprime_at_r, sol.beta_second
                    ),
                    Format::Json => format!(
                        "{}\n",
                        json!({
                            "alpha": sol.alpha,
                            "r": sol.r,
                            "h_at_r": sol.h_at_r,
                            "hprime_at_r": sol.hprime_at_r,
                            "beta_second": sol.beta_second,
                        })
                    ),
                };
                return emit(&output, text);
            }
            let rows =
                estimate_table(d.unwrap(), nmax.unwrap()).map_err(|e| e.to_string())?;
            let text = match output.format {
                Format::Csv => spherecount::saddle::estimate_csv(&rows),
                Format::Json => format!("{}\n", serde_json::to_value(&rows).unwrap()),
            };
            emit(&output, text)
        }
        Cmd::Coeffs {
            kind,
            terms,
            output,
        } => {
            let coeffs = match kind.as_str() {
                "a" => {
                    if terms == 0 {
                        return Err("kind a needs --terms >= 1".into());
                    }
                    inversion_coeffs(terms)
                }
                _ => b_coeffs(terms),
            };
            let text = match output.format {
                Format::Csv => coeffs.to_csv(),
                Format::Json => format!("{}\n", coeffs.to_json()),
            };
            emit(&output, text)
        }
        Cmd::Krawtchouk { n, k, x, output } => {
            // a single point prints just the value; a row prints the table
            if let (Some(x), Format::Csv) = (x, output.format) {
                let v = kr(k, n, x).map_err(|e| e.to_string())?;
                return emit(
                    &output,
                    format!("{}\n", spherecount::series::rational_string(&v)),
                );
            }
            let rows: Vec<(u64, String)> = match x {
                Some(x) => {
                    let v = kr(k, n, x).map_err(|e| e.to_string())?;
                    vec![(x, spherecount::series::rational_string(&v))]
                }
                None => kr_row(k, n)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .enumerate()
                    .map(|(x, v)| (x as u64, spherecount::series::rational_string(v)))
                    .collect(),
            };
            let text = match output.format {
                Format::Csv => {
                    let mut s = String::from("n,k,x,value\n");
                    for (x, v) in &rows {
                        s.push_str(&format!("{n},{k},{x},{v}\n"));
                    }
                    s
                }
                Format::Json => {
                    let values: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(x, v)| json!({"x": x, "value": v}))
                        .collect();
                    format!("{}\n", json!({"n": n, "k": k, "values": values}))
                }
            };
            emit(&output, text)
        }
        Cmd::Beta {
            d,
            nbar,
            samples,
            seed,
            output,
        } => {
            let entries: Vec<u32> = parse_list(&nbar, "nbar")?;
            let nbar = MultiIndex::new(entries);
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for i in 0..samples {
                let xi = TorusPoint::uniform(d, &mut rng);
                let value = spherecount::beta_eval(&nbar, &xi, None)
                    .map_err(|e| e.to_string())?
                    .value;
                let oracle = spherecount::beta_bruteforce(&nbar, &xi).ok();
                rows.push((i, value, oracle.map(|(re, _)| re)));
            }
            let text = match output.format {
                Format::Csv => {
                    let mut s = String::from("seed,sample,value,oracle,abs_diff\n");
                    for (i, v, o) in &rows {
                        match o {
                            Some(o) => {
                                s.push_str(&format!("{seed},{i},{v},{o},{}\n", (v - o).abs()))
                            }
                            None => s.push_str(&format!("{seed},{i},{v},,\n")),
                        }
                    }
                    s
                }
                Format::Json => {
                    let items: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(i, v, o)| json!({"sample": i, "value": v, "oracle": o}))
                        .collect();
                    format!(
                        "{}\n",
                        json!({"d": d, "nbar": nbar.to_string(), "seed": seed, "rows": items})
                    )
                }
            };
            emit(&output, text)
        }
        Cmd::Bounds {
            suite,
            samples,
            seed,
            output,
        } => {
            let suite = BoundSuite::parse(&suite).map_err(|e| e.to_string())?;
            let report = check_bounds(suite, samples, seed).map_err(|e| e.to_string())?;
            let text = match output.format {
                Format::Csv => report.to_csv(),
                Format::Json => format!("{}\n", serde_json::to_value(&report).unwrap()),
            };
            emit(&output, text)
        }
        Cmd::Concentration {
            d,
            n,
            k_small,
            a,
            output,
        } => {
            let report = concentration_report(d, n, k_small, a).map_err(|e| e.to_string())?;
            let text = match output.format {
                Format::Csv => report.to_csv(),
                Format::Json => format!("{}\n", report.to_json()),
            };
            emit(&output, text)
        }
        Cmd::Simulate {
            d,
            m,
            family,
            trials,
            seed,
            output,
        } => {
            let specs: Result<Vec<KernelSpec>, String> =
                family.iter().map(|s| parse_kernel_spec(s, d, m)).collect();
            let report = spherecount::empirical_norm_ratio(&specs?, trials, seed)
                .map_err(|e| e.to_string())?;
            let text = match output.format {
                Format::Csv => report.to_csv(),
                Format::Json => format!("{}\n", serde_json::to_value(&report).unwrap()),
            };
            emit(&output, text)
        }
        Cmd::RmCheck {
            sbar,
            mbar,
            trials,
            seed,
            output,
        } => {
            let sbar: Vec<u32> = parse_list(&sbar, "sbar")?;
            let mbar: Vec<u64> = match mbar {
                Some(m) => parse_list(&m, "mbar")?,
                None => sbar.iter().map(|&s| 1u64 << s).collect(),
            };
            let report = rm_check_random(&sbar, &mbar, trials, seed).map_err(|e| e.to_string())?;
            let text = match output.format {
                Format::Csv => report.to_csv(),
                Format::Json => format!("{}\n", serde_json::to_value(&report).unwrap()),
            };
            emit(&output, text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
