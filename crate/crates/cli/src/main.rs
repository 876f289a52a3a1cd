//! Command-line surface for the powerfree library.
//!
//! Exit codes: 0 success, 2 invariant violation (failed sandwich check or
//! property suite), 3 budget/timeout, 4 configuration error.

use clap::{Parser, Subcommand, ValueEnum};
use powerfree::counting;
use powerfree::detmethod;
use powerfree::euler_product::{self, ConstantVariant};
use powerfree::experiment::{self, ExperimentConfig};
use powerfree::local_density;
use powerfree::polynomial::{LatticeBox, MultiPoly};
use powerfree::sieve::{self, SieveCutoffs};
use powerfree::{Budget, Error};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "powerfree",
    version,
    about = "Exact counts, local densities, Euler products, sieve splits and \
             determinant-method parameters for power-free values of polynomials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads for box enumeration (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Work budget override for residue and point enumerations.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// RNG seed for property suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Integer,
    PrimeInput,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Integer,
    PrimeInput,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetMode {
    M,
    R,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact k-free count over an integer box or prime tuples.
    Count {
        #[arg(long)]
        poly: String,
        /// Number of variables (inferred from the expression when omitted).
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long)]
        k: u32,
        /// Uniform box bound.
        #[arg(long, short = 'B', conflicts_with = "bounds")]
        b: Option<i64>,
        /// Per-variable bounds, comma separated.
        #[arg(long = "box", value_name = "B1,B2,...")]
        bounds: Option<String>,
        #[arg(long)]
        prime_inputs: bool,
        #[arg(long)]
        include_negative_primes: bool,
    },
    /// Local densities rho, rho* and admissibility at a prime power.
    Density {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long, short = 'p', conflicts_with = "modulus")]
        prime: Option<u64>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Arbitrary modulus for plain rho (no record fields).
        #[arg(long)]
        modulus: Option<u64>,
        /// Also report the literal pairwise-coprime reading of rho*.
        #[arg(long)]
        pairwise: bool,
    },
    /// Truncated Euler product for the leading constant.
    Constant {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        prime_bound: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Integer)]
        variant: VariantArg,
        /// Include the per-prime factor table.
        #[arg(long)]
        factors: bool,
        #[arg(long, default_value_t = 128)]
        precision_bits: u32,
    },
    /// N1/N2/N3 decomposition with the sandwich check.
    Sieve {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long)]
        k: u32,
        #[arg(long, short = 'B')]
        b: i64,
        #[arg(long)]
        xi1: Option<f64>,
        #[arg(long)]
        xi2: Option<f64>,
        #[arg(long, value_enum, default_value_t = FlavorArg::Integer)]
        flavor: FlavorArg,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Newton-polyhedron maximum T, exponent set, W and thresholds.
    Detparams {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long, short = 'B', conflicts_with = "bounds")]
        b: Option<i64>,
        #[arg(long = "box", value_name = "B1,B2,...")]
        bounds: Option<String>,
        /// Rational lambda, e.g. "1", "1/2" or "0.25".
        #[arg(long, default_value = "1")]
        lambda: String,
        /// Epsilon for the modulus window (W T^eps, W T^{2 eps}].
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Dyadic counts M(f; B1,B2,B3) and R(F; B, H).
    Detcount {
        #[arg(long, value_enum)]
        mode: DetMode,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        b1: Option<f64>,
        #[arg(long)]
        b2: Option<f64>,
        #[arg(long)]
        b3: Option<f64>,
        #[arg(long, short = 'B')]
        b: Option<i64>,
        #[arg(long, short = 'H')]
        h: Option<f64>,
    },
    /// Convergence study: constant, counts, sieve splits, ratios per B.
    Experiment {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n_vars: Option<usize>,
        #[arg(long)]
        k: u32,
        #[arg(long, value_name = "B1,B2,...")]
        b_schedule: String,
        #[arg(long)]
        prime_inputs: bool,
        #[arg(long)]
        include_negative_primes: bool,
        #[arg(long, default_value_t = 1000)]
        prime_bound: u64,
        #[arg(long)]
        xi1: Option<f64>,
        #[arg(long)]
        xi2: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Cross-module property suites (sandwich, Möbius, CRT, Hensel,
    /// Vandermonde) with a fixed seed.
    Suite {
        /// Cases per suite, comma separated in suite order; empty runs none.
        #[arg(long, default_value = "10,10,20,50,20")]
        sizes: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(4);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn budget_of(cli: &Cli) -> Budget {
    match cli.budget {
        Some(v) => Budget::uniform(v),
        None => Budget::default(),
    }
}

fn parse_poly(text: &str, n_vars: Option<usize>) -> Result<MultiPoly, Error> {
    match n_vars {
        Some(n) => MultiPoly::parse(text, n),
        None => {
            // smallest variable count that parses
            let mut last_err = None;
            for n in 1..=9 {
                match MultiPoly::parse(text, n) {
                    Ok(p) => return Ok(p),
                    Err(e) => last_err = Some(e),
                }
            }
            Err(last_err.unwrap())
        }
    }
}

fn parse_bounds(n_vars: usize, b: Option<i64>, bounds: &Option<String>) -> Result<LatticeBox, Error> {
    match (b, bounds) {
        (Some(v), None) => LatticeBox::uniform(n_vars, v),
        (None, Some(list)) => {
            let parsed: Result<Vec<i64>, _> = list.split(',').map(|s| s.trim().parse()).collect();
            let parsed =
                parsed.map_err(|e| Error::InvalidConfig(format!("box bounds: {e}")))?;
            LatticeBox::new(parsed)
        }
        _ => Err(Error::InvalidConfig(
            "exactly one of --B and --box is required".into(),
        )),
    }
}

fn parse_lambda(text: &str) -> Result<num_rational::Ratio<u32>, Error> {
    let bad = |m: &str| Error::InvalidConfig(format!("lambda {text:?}: {m}"));
    if let Some((a, b)) = text.split_once('/') {
        let a: u32 = a.trim().parse().map_err(|_| bad("bad numerator"))?;
        let b: u32 = b.trim().parse().map_err(|_| bad("bad denominator"))?;
        if b == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(num_rational::Ratio::new(a, b));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 9 {
            return Err(bad("too many decimal places"));
        }
        let int: u32 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad("bad integer part"))?
        };
        let frac: u32 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad("bad fraction part"))?
        };
        let den = 10u32.pow(digits);
        return Ok(num_rational::Ratio::new(int * den + frac, den));
    }
    let v: u32 = text.trim().parse().map_err(|_| bad("not a number"))?;
    if v == 0 {
        return Err(bad("lambda must be positive"));
    }
    Ok(num_rational::Ratio::from_integer(v))
}

fn parse_i64_list(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| Error::InvalidConfig(format!("list entry {s:?}: {e}")))
        })
        .collect()
}

fn emit(cli: &Cli, json: String, csv: Option<String>) -> Result<(), Error> {
    let body = match cli.format {
        Format::Json => json,
        Format::Csv => csv.unwrap_or(json),
    };
    let io_err = |e: std::io::Error| Error::InvalidConfig(format!("output: {e}"));
    match &cli.out {
        Some(path) => std::fs::write(path, body.as_bytes()).map_err(io_err),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| {
                    if body.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(io_err)
        }
    }
}

fn scalar_csv(headers: &[&str], values: &[String]) -> String {
    format!("{}\n{}\n", headers.join(","), values.join(","))
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let budget = budget_of(cli);
    match &cli.cmd {
        Cmd::Count {
            poly,
            n_vars,
            k,
            b,
            bounds,
            prime_inputs,
            include_negative_primes,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let report = if *prime_inputs {
                let bb = b.ok_or_else(|| {
                    Error::InvalidConfig("--B is required with --prime-inputs".into())
                })?;
                counting::count_kfree_prime_inputs(
                    &f,
                    *k,
                    bb,
                    *include_negative_primes,
                    &budget,
                )?
            } else {
                let bx = parse_bounds(f.n_vars(), *b, bounds)?;
                counting::count_kfree(&f, *k, &bx, &budget)?
            };
            if report.perfect_power_degeneracy {
                eprintln!(
                    "warning: the primitive part of F is a nontrivial {k}-th power; \
                     the leading-constant asymptotic cannot hold as stated"
                );
            }
            let json = serde_json::to_string_pretty(&report).unwrap();
            let csv = scalar_csv(
                &["count", "zero_points", "k", "prime_inputs", "elapsed_s"],
                &[
                    report.count.to_string(),
                    report.zero_points.to_string(),
                    report.k.to_string(),
                    report.prime_inputs.to_string(),
                    report.elapsed_s.to_string(),
                ],
            );
            emit(cli, json, Some(csv))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Density {
            poly,
            n_vars,
            prime,
            k,
            modulus,
            pairwise,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let json = match (prime, modulus) {
                (Some(p), None) => {
                    let rec = local_density::local_density_record(&f, *p, *k, &budget)?;
                    let mut value = serde_json::json!({
                        "p": rec.p,
                        "k": rec.k,
                        "rho": rec.rho.to_string(),
                        "rho_star": rec.rho_star.to_string(),
                        "admissible": rec.admissible,
                        "phi_pk_n": rec.phi_pk_n.to_string(),
                    });
                    if *pairwise {
                        let lit = local_density::rho_star(
                            &f,
                            *p,
                            *k,
                            local_density::RhoStarConvention::PairwiseCoprime,
                            &budget,
                        )?;
                        value["rho_star_pairwise"] =
                            serde_json::Value::String(lit.to_string());
                    }
                    serde_json::to_string_pretty(&value).unwrap()
                }
                (None, Some(m)) => {
                    let rho = local_density::rho(&f, *m, &budget)?;
                    serde_json::to_string_pretty(&serde_json::json!({
                        "m": m,
                        "rho": rho.to_string(),
                    }))
                    .unwrap()
                }
                _ => {
                    return Err(Error::InvalidConfig(
                        "exactly one of --prime and --modulus is required".into(),
                    ))
                }
            };
            emit(cli, json, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Constant {
            poly,
            n_vars,
            k,
            prime_bound,
            variant,
            factors,
            precision_bits,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let variant = match variant {
                VariantArg::Integer => ConstantVariant::Integer,
                VariantArg::PrimeInput => ConstantVariant::PrimeInput,
            };
            let est = euler_product::constant_c_with_options(
                &f,
                *k,
                *prime_bound,
                variant,
                &budget,
                *precision_bits,
                *factors,
            )?;
            let truncated = est.truncated_at;
            let json = serde_json::to_string_pretty(&est).unwrap();
            let csv = scalar_csv(
                &["value", "prime_bound", "tail_estimate", "vanishing_prime"],
                &[
                    est.value.to_string(),
                    est.prime_bound.to_string(),
                    est.tail_estimate.map(|t| t.to_string()).unwrap_or_default(),
                    est.vanishing_prime
                        .map(|p| p.to_string())
                        .unwrap_or_default(),
                ],
            );
            emit(cli, json, Some(csv))?;
            if let Some(p) = truncated {
                eprintln!("error: budget exceeded at prime {p}; partial product written");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sieve {
            poly,
            n_vars,
            k,
            b,
            xi1,
            xi2,
            flavor,
            c,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let cutoffs = match flavor {
                FlavorArg::Integer => SieveCutoffs::integer_defaults(*b, f.n_vars(), *k)?,
                FlavorArg::PrimeInput => {
                    SieveCutoffs::prime_defaults(*b, f.n_vars(), *k, *c)?
                }
            }
            .with_overrides(*xi1, *xi2);
            let bx = LatticeBox::uniform(f.n_vars(), *b)?;
            let split = sieve::sieve_decompose(&f, *k, &bx, &cutoffs, &budget)?;
            let json = serde_json::to_string_pretty(&split).unwrap();
            let csv = scalar_csv(
                &["B", "n1", "n2", "n3", "n_exact", "sandwich_ok"],
                &[
                    b.to_string(),
                    split.n1.to_string(),
                    split.n2.to_string(),
                    split.n3.to_string(),
                    split.exact_count.to_string(),
                    split.sandwich_ok.to_string(),
                ],
            );
            let ok = split.sandwich_ok;
            emit(cli, json, Some(csv))?;
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Cmd::Detparams {
            poly,
            n_vars,
            b,
            bounds,
            lambda,
            epsilon,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let bx = parse_bounds(f.n_vars(), *b, bounds)?;
            let lambda = parse_lambda(lambda)?;
            let params = detmethod::det_params(&f, &bx, lambda)?;
            let t: num_bigint::BigInt = params.t.parse().unwrap();
            let window = detmethod::q_window(&bx, &t, *epsilon)?;
            let d = f.degree().max(2);
            let table: Vec<_> = (2..=12u32.max(d + 1))
                .map(|k| detmethod::kfree_threshold(k, d))
                .collect();
            let json = serde_json::to_string_pretty(&serde_json::json!({
                "params": params,
                "q_window": window,
                "eta_thresholds": table,
            }))
            .unwrap();
            emit(cli, json, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Detcount {
            mode,
            poly,
            n_vars,
            k,
            b1,
            b2,
            b3,
            b,
            h,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let json = match mode {
                DetMode::M => {
                    let (b1, b2, b3) = match (b1, b2, b3) {
                        (Some(a), Some(b), Some(c)) => (*a, *b, *c),
                        _ => {
                            return Err(Error::InvalidConfig(
                                "mode m needs --b1 --b2 --b3".into(),
                            ))
                        }
                    };
                    let count = detmethod::count_m(&f, *k, b1, b2, b3, &budget)?;
                    serde_json::to_string_pretty(&serde_json::json!({
                        "mode": "M", "count": count,
                        "b1": b1, "b2": b2, "b3": b3, "k": k,
                    }))
                    .unwrap()
                }
                DetMode::R => {
                    let (bb, hh) = match (b, h) {
                        (Some(bb), Some(hh)) => (*bb, *hh),
                        _ => {
                            return Err(Error::InvalidConfig("mode r needs --B and --H".into()))
                        }
                    };
                    let bx = LatticeBox::uniform(f.n_vars(), bb)?;
                    let r = detmethod::count_r(&f, *k, &bx, hh, &budget)?;
                    serde_json::to_string_pretty(&serde_json::json!({
                        "mode": "R", "count": r.count, "zero_points": r.zero_points,
                        "B": bb, "H": hh, "k": k,
                    }))
                    .unwrap()
                }
            };
            emit(cli, json, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Experiment {
            poly,
            n_vars,
            k,
            b_schedule,
            prime_inputs,
            include_negative_primes,
            prime_bound,
            xi1,
            xi2,
            c,
        } => {
            let f = parse_poly(poly, *n_vars)?;
            let mut cfg = ExperimentConfig::new(poly.clone(), f.n_vars(), *k, parse_i64_list(b_schedule)?);
            cfg.prime_inputs = *prime_inputs;
            cfg.include_negative_primes = *include_negative_primes;
            cfg.prime_bound = *prime_bound;
            cfg.xi1_override = *xi1;
            cfg.xi2_override = *xi2;
            cfg.c = *c;
            cfg.seed = cli.seed;
            cfg.threads = cli.threads;
            cfg.tuple_budget = budget.tuples;
            cfg.point_budget = budget.points;
            let report = experiment::run_experiment(&cfg)?;
            let json = report.to_json();
            let mut csv_bytes = Vec::new();
            report
                .write_csv(&mut csv_bytes)
                .map_err(|e| Error::InvalidConfig(format!("csv: {e}")))?;
            let all_ok = report.all_sandwich_ok;
            let failure = report.failure.clone();
            emit(cli, json, Some(String::from_utf8(csv_bytes).unwrap()))?;
            if let Some(fail) = failure {
                eprintln!(
                    "error at B={}: {} (partial report written)",
                    fail.at_b, fail.message
                );
                return Ok(ExitCode::from(fail.exit_code as u8));
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Cmd::Suite { sizes } => {
            let sizes: Vec<usize> = sizes
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| Error::InvalidConfig(format!("sizes: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let summary = experiment::run_property_suite(cli.seed, &sizes);
            for s in &summary.suites {
                eprintln!(
                    "suite {:<22} {:>4} cases  {}",
                    s.name,
                    s.cases,
                    if s.passed { "pass" } else { "FAIL" }
                );
            }
            if summary.no_coverage {
                eprintln!("warning: no coverage (all suites ran zero cases)");
            }
            let json = serde_json::to_string_pretty(&summary).unwrap();
            let all_passed = summary.all_passed;
            emit(cli, json, None)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}
