//! Experiment harness: convergence studies across a schedule of box sizes,
//! cross-module property suites, and CSV/JSON report serialization.
//!
//! Reports are deterministic for a fixed config and seed; elapsed-time
//! fields are excluded from the determinism view.

use crate::counting::{self, TheoremTags};
use crate::detmethod;
use crate::error::{Error, Result};
use crate::euler_product::{self, ConstantEstimate, ConstantVariant};
use crate::local_density;
use crate::polynomial::{LatticeBox, MultiPoly};
use crate::sieve::{self, SieveCutoffs, SieveFlavor};
use crate::Budget;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;

/// Configuration for one convergence experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub poly: String,
    pub n_vars: usize,
    pub k: u32,
    /// Strictly increasing box sizes.
    pub b_schedule: Vec<i64>,
    pub prime_inputs: bool,
    pub include_negative_primes: bool,
    /// Prime bound for the leading-constant product.
    pub prime_bound: u64,
    pub xi1_override: Option<f64>,
    pub xi2_override: Option<f64>,
    /// The constant in the prime flavor's `exp(-c sqrt(log B))`.
    pub c: f64,
    pub seed: u64,
    pub threads: usize,
    pub tuple_budget: u64,
    pub point_budget: u64,
}

impl ExperimentConfig {
    pub fn new(poly: impl Into<String>, n_vars: usize, k: u32, b_schedule: Vec<i64>) -> Self {
        let budget = Budget::default();
        ExperimentConfig {
            poly: poly.into(),
            n_vars,
            k,
            b_schedule,
            prime_inputs: false,
            include_negative_primes: false,
            prime_bound: 1000,
            xi1_override: None,
            xi2_override: None,
            c: 1.0,
            seed: 0,
            threads: 0,
            tuple_budget: budget.tuples,
            point_budget: budget.points,
        }
    }

    pub fn budget(&self) -> Budget {
        Budget {
            tuples: self.tuple_budget,
            points: self.point_budget,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig("k must be >= 2".into()));
        }
        if self.prime_bound < 2 {
            return Err(Error::InvalidConfig("prime bound must be >= 2".into()));
        }
        if self.b_schedule.is_empty() {
            return Err(Error::InvalidConfig("B schedule must be nonempty".into()));
        }
        if self.b_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "B schedule must be strictly increasing".into(),
            ));
        }
        if self.b_schedule.iter().any(|&b| b < 1) {
            return Err(Error::InvalidConfig("B values must be >= 1".into()));
        }
        Ok(())
    }
}

/// One row of the per-B table.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub b: i64,
    pub exact_count: u64,
    pub zero_points: u64,
    /// `C (2B+1)^n` for integer inputs; `C' pi(B)^n` (times `2^n` with
    /// negatives) for prime inputs. Absent when the constant vanishes.
    pub main_term: Option<f64>,
    /// The textbook normalization `C' B^n / (log B)^n`; prime inputs only.
    pub main_term_naive: Option<f64>,
    pub ratio: Option<f64>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub n3: Option<u64>,
    pub sandwich_ok: Option<bool>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentFailure {
    pub at_b: i64,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub poly_canonical: String,
    pub applicability: TheoremTags,
    pub perfect_power_degeneracy: bool,
    pub constant: ConstantEstimate,
    pub rows: Vec<ExperimentRow>,
    /// Explains skipped sieve columns (e.g. unusable prime-flavor cutoffs).
    pub cutoff_note: Option<String>,
    pub all_sandwich_ok: bool,
    /// Set when a module error stopped the schedule; rows up to that B are
    /// still present.
    pub failure: Option<ExperimentFailure>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with elapsed fields zeroed; byte-identical across reruns of the
    /// same config and seed.
    pub fn determinism_json(&self) -> String {
        let mut clone = self.clone();
        for row in &mut clone.rows {
            row.elapsed_s = 0.0;
        }
        clone.to_json()
    }

    /// CSV: header row, UTF-8, one row per B.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "B",
            "exact_count",
            "zero_points",
            "main_term",
            "main_term_naive",
            "ratio",
            "n1",
            "n2",
            "n3",
            "sandwich_ok",
            "elapsed_s",
        ])
        .map_err(csv_io)?;
        for r in &self.rows {
            w.write_record([
                r.b.to_string(),
                r.exact_count.to_string(),
                r.zero_points.to_string(),
                opt_num(r.main_term),
                opt_num(r.main_term_naive),
                opt_num(r.ratio),
                opt_u64(r.n1),
                opt_u64(r.n2),
                opt_u64(r.n3),
                r.sandwich_ok.map(|b| b.to_string()).unwrap_or_default(),
                r.elapsed_s.to_string(),
            ])
            .map_err(csv_io)?;
        }
        w.flush()
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Run the experiment: constant once, then exact count, sieve split and
/// ratio per scheduled B. Module errors stop the schedule but leave the
/// partial report intact.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let f = MultiPoly::parse(&cfg.poly, cfg.n_vars)
        .map_err(|e| Error::InvalidConfig(format!("polynomial: {e}")))?;
    if f.is_zero() {
        return Err(Error::InvalidConfig("polynomial must be nonzero".into()));
    }
    let budget = cfg.budget();
    let variant = if cfg.prime_inputs {
        ConstantVariant::PrimeInput
    } else {
        ConstantVariant::Integer
    };
    let constant = euler_product::constant_c(&f, cfg.k, cfg.prime_bound, variant, &budget)?;
    if let Some(p) = constant.truncated_at {
        // a partial product would silently skew every ratio below
        return Err(Error::BudgetExceeded {
            required: p as u128,
            budget: budget.tuples,
        });
    }
    // the theorems assume degree >= 2; nothing applies below that
    let applicability = if f.degree() >= 2 {
        counting::applicability(f.n_vars(), f.degree(), cfg.k)?
    } else {
        TheoremTags {
            mt1: false,
            mt2: false,
            mt3: false,
        }
    };
    let degenerate = f
        .kth_root_of_primitive_part(cfg.k)
        .map(|g| g.degree() >= 1)
        .unwrap_or(false);
    let n = f.n_vars() as u32;
    let mut rows = Vec::new();
    let mut cutoff_note = None;
    let mut failure: Option<ExperimentFailure> = None;
    for &b in &cfg.b_schedule {
        let started = Instant::now();
        let count_result = if cfg.prime_inputs {
            counting::count_kfree_prime_inputs(
                &f,
                cfg.k,
                b,
                cfg.include_negative_primes,
                &budget,
            )
        } else {
            LatticeBox::uniform(f.n_vars(), b)
                .and_then(|bx| counting::count_kfree(&f, cfg.k, &bx, &budget))
        };
        let report = match count_result {
            Ok(r) => r,
            Err(e) => {
                failure = Some(ExperimentFailure {
                    at_b: b,
                    message: e.to_string(),
                    exit_code: e.exit_code(),
                });
                break;
            }
        };
        let (main_term, main_term_naive) = main_terms(&constant, cfg, n, b);
        let ratio = main_term
            .filter(|&m| m > 0.0)
            .map(|m| report.count as f64 / m);
        let split = sieve_split_for(&f, cfg, b, &budget, &mut cutoff_note);
        let (n1, n2, n3, sandwich_ok) = match split {
            Ok(Some(s)) => (Some(s.n1), Some(s.n2), Some(s.n3), Some(s.sandwich_ok)),
            Ok(None) => (None, None, None, None),
            Err(e) => {
                failure = Some(ExperimentFailure {
                    at_b: b,
                    message: e.to_string(),
                    exit_code: e.exit_code(),
                });
                break;
            }
        };
        rows.push(ExperimentRow {
            b,
            exact_count: report.count,
            zero_points: report.zero_points,
            main_term,
            main_term_naive,
            ratio,
            n1,
            n2,
            n3,
            sandwich_ok,
            elapsed_s: started.elapsed().as_secs_f64(),
        });
    }
    let all_sandwich_ok = rows
        .iter()
        .all(|r| r.sandwich_ok.unwrap_or(true));
    Ok(ExperimentReport {
        config: cfg.clone(),
        poly_canonical: f.to_string(),
        applicability,
        perfect_power_degeneracy: degenerate,
        constant,
        rows,
        cutoff_note,
        all_sandwich_ok,
        failure,
    })
}

fn main_terms(
    constant: &ConstantEstimate,
    cfg: &ExperimentConfig,
    n: u32,
    b: i64,
) -> (Option<f64>, Option<f64>) {
    if constant.value <= 0.0 {
        return (None, None);
    }
    if cfg.prime_inputs {
        let pi = crate::arith::primes_up_to(b.max(0) as u64).len() as f64;
        let sign_factor = if cfg.include_negative_primes {
            2f64.powi(n as i32)
        } else {
            1.0
        };
        let pi_term = constant.value * sign_factor * pi.powi(n as i32);
        let lb = (b as f64).ln();
        let naive = if lb > 0.0 {
            Some(constant.value * sign_factor * (b as f64 / lb).powi(n as i32))
        } else {
            None
        };
        (Some(pi_term), naive)
    } else {
        let points = (2.0 * b as f64 + 1.0).powi(n as i32);
        (Some(constant.value * points), None)
    }
}

fn sieve_split_for(
    f: &MultiPoly,
    cfg: &ExperimentConfig,
    b: i64,
    budget: &Budget,
    cutoff_note: &mut Option<String>,
) -> Result<Option<sieve::SieveSplit>> {
    if b < 2 {
        return Ok(None);
    }
    let n = f.n_vars();
    let cutoffs = if cfg.prime_inputs {
        SieveCutoffs::prime_defaults(b, n, cfg.k, cfg.c)?
    } else {
        SieveCutoffs::integer_defaults(b, n, cfg.k)?
    }
    .with_overrides(cfg.xi1_override, cfg.xi2_override);
    if cutoffs.validate().is_err() {
        if cutoff_note.is_none() {
            *cutoff_note = Some(format!(
                "sieve columns skipped: cutoffs unusable at desk scale \
                 (xi1={} >= xi2={}); override --xi1/--xi2 to enable",
                cutoffs.xi1, cutoffs.xi2
            ));
        }
        return Ok(None);
    }
    let bx = LatticeBox::uniform(n, b)?;
    sieve::sieve_decompose(f, cfg.k, &bx, &cutoffs, budget).map(Some)
}

// ---------------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub all_passed: bool,
    /// True when every suite ran zero cases.
    pub no_coverage: bool,
}

pub const SUITE_NAMES: [&str; 5] = [
    "sandwich",
    "mobius_identity",
    "crt_multiplicativity",
    "hensel_consistency",
    "vandermonde_rank",
];

/// The Möbius-identity case check, exposed so harnesses can probe failure
/// reporting by flipping one side.
pub fn mobius_case_consistent(mobius_value: i64, exact_count: u64) -> bool {
    mobius_value == exact_count as i64
}

/// Run the cross-module invariant suites; `sizes` gives the case count per
/// suite in [`SUITE_NAMES`] order (missing entries run zero cases).
/// Deterministic for a fixed seed. Failures are results, not errors.
pub fn run_property_suite(seed: u64, sizes: &[usize]) -> SuiteSummary {
    let size = |i: usize| sizes.get(i).copied().unwrap_or(0);
    let suites = vec![
        sandwich_suite(seed, size(0)),
        mobius_suite(seed, size(1)),
        crt_suite(seed, size(2)),
        hensel_suite(seed, size(3)),
        vandermonde_suite(seed, size(4)),
    ];
    let all_passed = suites.iter().all(|s| s.passed);
    let no_coverage = suites.iter().all(|s| s.cases == 0);
    SuiteSummary {
        seed,
        suites,
        all_passed,
        no_coverage,
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Random sparse polynomial: n <= 3 variables, total degree <= 4,
/// coefficients in [-9, 9], guaranteed nonzero.
pub fn random_poly(rng: &mut ChaCha8Rng, n_vars: usize, max_degree: u32) -> MultiPoly {
    loop {
        let terms = rng.gen_range(1..=5usize);
        let mut list: Vec<(Vec<u32>, BigInt)> = Vec::with_capacity(terms);
        for _ in 0..terms {
            let mut exps = vec![0u32; n_vars];
            let mut remaining = max_degree;
            for e in exps.iter_mut() {
                *e = rng.gen_range(0..=remaining);
                remaining -= *e;
            }
            let coeff = loop {
                let c = rng.gen_range(-9i64..=9);
                if c != 0 {
                    break c;
                }
            };
            list.push((exps, BigInt::from(coeff)));
        }
        let p = MultiPoly::from_terms(n_vars, list).expect("dimensions match");
        if !p.is_zero() {
            return p;
        }
    }
}

fn sandwich_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 1);
    let budget = Budget::default();
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = rng.gen_range(1..=3usize);
        let f = random_poly(&mut rng, n, 4);
        let k = rng.gen_range(2..=3u32);
        let b = match n {
            1 => rng.gen_range(5..=50i64),
            2 => rng.gen_range(3..=20i64),
            _ => rng.gen_range(2..=8i64),
        };
        let bx = LatticeBox::uniform(n, b).expect("b >= 1");
        let cutoffs = if rng.gen_bool(0.5) {
            SieveCutoffs::integer_defaults(b, n, k).expect("b >= 2")
        } else {
            SieveCutoffs {
                xi1: rng.gen_range(1.2..5.0),
                xi2: rng.gen_range(6.0..60.0),
                flavor: SieveFlavor::Integer,
                c: 1.0,
            }
        };
        match (
            sieve::sieve_decompose(&f, k, &bx, &cutoffs, &budget),
            LatticeBox::uniform(n, b)
                .and_then(|bx| counting::count_kfree(&f, k, &bx, &budget)),
        ) {
            (Ok(split), Ok(count)) => {
                let lower = split.n1 as i128 - split.n2 as i128 - split.n3 as i128;
                if !(lower <= count.count as i128 && count.count <= split.n1) {
                    failures.push(format!(
                        "case {i}: F={f} k={k} B={b}: {} - {} - {} vs N={} vs {}",
                        split.n1, split.n2, split.n3, count.count, split.n1
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                failures.push(format!("case {i}: F={f} k={k} B={b}: error {e}"));
            }
        }
    }
    finish_suite("sandwich", cases, failures)
}

fn mobius_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 2);
    let budget = Budget::default();
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = rng.gen_range(1..=3usize);
        let f = random_poly(&mut rng, n, 3);
        let k = rng.gen_range(2..=3u32);
        let b = match n {
            1 => rng.gen_range(5..=60i64),
            2 => rng.gen_range(3..=15i64),
            _ => rng.gen_range(2..=6i64),
        };
        let bx = LatticeBox::uniform(n, b).expect("b >= 1");
        match (
            sieve::mobius_estimate(&f, k, &bx, None, &budget),
            counting::count_kfree(&f, k, &bx, &budget),
        ) {
            (Ok(est), Ok(count)) => {
                if !mobius_case_consistent(est, count.count) {
                    failures.push(format!(
                        "case {i}: F={f} k={k} B={b}: mobius {est} != exact {}",
                        count.count
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                failures.push(format!("case {i}: F={f} k={k} B={b}: error {e}"));
            }
        }
    }
    finish_suite("mobius_identity", cases, failures)
}

fn crt_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 3);
    let budget = Budget::default();
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = rng.gen_range(1..=3usize);
        let f = random_poly(&mut rng, n, 4);
        let cap = match n {
            1 => 20u64,
            2 => 14,
            _ => 7,
        };
        let (m1, m2) = loop {
            let a = rng.gen_range(2..=cap);
            let b = rng.gen_range(2..=cap);
            if num_integer::gcd(a, b) == 1 {
                break (a, b);
            }
        };
        let lhs = local_density::rho(&f, m1 * m2, &budget);
        let rhs1 = local_density::rho(&f, m1, &budget);
        let rhs2 = local_density::rho(&f, m2, &budget);
        match (lhs, rhs1, rhs2) {
            (Ok(l), Ok(r1), Ok(r2)) => {
                if l != r1.clone() * r2.clone() {
                    failures.push(format!(
                        "case {i}: F={f} m1={m1} m2={m2}: rho(m1 m2)={l} != {r1}*{r2}"
                    ));
                }
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                failures.push(format!("case {i}: F={f} m1={m1} m2={m2}: error {e}"));
            }
        }
    }
    finish_suite("crt_multiplicativity", cases, failures)
}

fn hensel_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 4);
    let budget = Budget::default();
    let mut failures = Vec::new();
    let primes = [2u64, 3, 5, 7, 11, 13];
    for i in 0..cases {
        let f = random_poly(&mut rng, 1, 4);
        let p = primes[rng.gen_range(0..primes.len())];
        let k = rng.gen_range(1..=3u32);
        let got = match local_density::rho_univariate(&f, p, k, &budget) {
            Ok(v) => v,
            Err(Error::DegenerateModP { .. }) => continue, // excluded by the precondition
            Err(e) => {
                failures.push(format!("case {i}: f={f} p={p} k={k}: error {e}"));
                continue;
            }
        };
        // brute-force oracle over Z/p^k
        let m = p.pow(k);
        let mut want = 0u64;
        for s in 0..m {
            let v = f.evaluate_i64(&[s as i64]).expect("univariate");
            if num_integer::Integer::mod_floor(&v, &BigInt::from(m)) == BigInt::from(0) {
                want += 1;
            }
        }
        if got.to_u64() != Some(want) {
            failures.push(format!(
                "case {i}: f={f} p={p} k={k}: lifted {got} != brute {want}"
            ));
        }
    }
    finish_suite("hensel_consistency", cases, failures)
}

fn vandermonde_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 5);
    let mut failures = Vec::new();
    let primes = [5u64, 7, 11, 13, 101];
    for i in 0..cases {
        let p = primes[rng.gen_range(0..primes.len())];
        let s = rng.gen_range(2..=5usize).min(p as usize);
        // distinct points mod p
        let mut pts: Vec<i64> = Vec::new();
        while pts.len() < s {
            let c = rng.gen_range(-50i64..=50);
            if pts.iter().all(|&q| (q - c).rem_euclid(p as i64) != 0) {
                pts.push(c);
            }
        }
        let points: Vec<Vec<BigInt>> = pts.iter().map(|&x| vec![BigInt::from(x)]).collect();
        let exps: Vec<Vec<u32>> = (0..s as u32).map(|e| vec![e]).collect();
        match detmethod::monomial_matrix(&points, &exps)
            .and_then(|m| detmethod::rank_mod_p(&m, p))
        {
            Ok(rank) => {
                if rank != s {
                    failures.push(format!(
                        "case {i}: p={p} points={pts:?}: rank {rank} != {s}"
                    ));
                }
            }
            Err(e) => failures.push(format!("case {i}: p={p}: error {e}")),
        }
    }
    finish_suite("vandermonde_rank", cases, failures)
}

fn finish_suite(name: &str, cases: usize, failures: Vec<String>) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        cases,
        passed: failures.is_empty(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_default_sizes() {
        let summary = run_property_suite(42, &[6, 6, 10, 15, 10]);
        for s in &summary.suites {
            assert!(s.passed, "{}: {:?}", s.name, s.failures);
        }
        assert!(summary.all_passed);
        assert!(!summary.no_coverage);
    }

    #[test]
    fn suite_deterministic_for_fixed_seed() {
        let a = run_property_suite(7, &[3, 3, 3, 3, 3]);
        let b = run_property_suite(7, &[3, 3, 3, 3, 3]);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn empty_sizes_vacuous_pass_flagged() {
        let summary = run_property_suite(42, &[]);
        assert!(summary.all_passed);
        assert!(summary.no_coverage);
        assert!(summary.suites.iter().all(|s| s.cases == 0));
    }

    #[test]
    fn fault_injection_flips_mobius_verdict() {
        // the harness check itself: flipping one exact count must fail
        assert!(mobius_case_consistent(14, 14));
        assert!(!mobius_case_consistent(14, 15));
    }

    #[test]
    fn experiment_report_deterministic_and_consistent() {
        let mut cfg = ExperimentConfig::new("x", 1, 2, vec![50, 100]);
        cfg.prime_bound = 200;
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.determinism_json(), b.determinism_json());
        assert!(a.failure.is_none());
        assert!(a.all_sandwich_ok);
        // CSV and JSON carry the same numbers
        let mut csv_bytes = Vec::new();
        a.write_csv(&mut csv_bytes).unwrap();
        let text = String::from_utf8(csv_bytes).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = |name: &str| header.iter().position(|h| *h == name).unwrap();
        let row = &a.rows[0];
        assert_eq!(first[idx("B")].parse::<i64>().unwrap(), row.b);
        assert_eq!(
            first[idx("exact_count")].parse::<u64>().unwrap(),
            row.exact_count
        );
        let csv_ratio: f64 = first[idx("ratio")].parse().unwrap();
        assert_eq!(csv_ratio.to_bits(), row.ratio.unwrap().to_bits());
    }

    #[test]
    fn experiment_vanishing_constant_skips_ratio() {
        let mut cfg = ExperimentConfig::new("2*x^2 + 2*x", 1, 2, vec![20]);
        cfg.prime_bound = 50;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.constant.vanishing_prime, Some(2));
        assert!(r.rows[0].main_term.is_none());
        assert!(r.rows[0].ratio.is_none());
    }

    #[test]
    fn experiment_config_validation() {
        let cfg = ExperimentConfig::new("x", 1, 2, vec![10, 10]);
        assert!(matches!(
            run_experiment(&cfg),
            Err(Error::InvalidConfig(_))
        ));
        let cfg = ExperimentConfig::new("x", 1, 1, vec![10]);
        assert!(run_experiment(&cfg).is_err());
        let cfg = ExperimentConfig::new("x +* 2", 1, 2, vec![10]);
        assert!(run_experiment(&cfg).is_err());
    }
}
