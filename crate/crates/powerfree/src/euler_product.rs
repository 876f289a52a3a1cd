//! Truncated Euler products for the leading constants.
//!
//! The integer-input constant is `prod_p (1 - rho_F(p^k)/p^{kn})`, the
//! prime-input one `prod_p (1 - rho*_F(p^k)/phi(p^k)^n)`. Factors are exact
//! rationals; the running product is accumulated in fixed-point arithmetic
//! (128 bits by default) so truncation error stays below the reported tail.
//!
//! The tail estimate is heuristic, not rigorous: factors are sampled on
//! `(P, 4P]`, `rho/p^{kn}` is fitted to `a * p^{-s}` by log-log least
//! squares, and the remainder is integrated against the prime-counting
//! density `1/log x`. An effective bound would need constants the theory
//! does not supply, so the field is labelled accordingly.

use crate::arith::{next_prime_u64, phi_prime_power, primes_up_to};
use crate::error::{Error, Result};
use crate::local_density::{self, RhoStarConvention};
use crate::polynomial::MultiPoly;
use crate::Budget;
use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_PRECISION_BITS: u32 = 128;

const TAIL_NOTE: &str = "heuristic log-log fit, not a rigorous bound";

/// Which local density feeds the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantVariant {
    Integer,
    PrimeInput,
}

/// Truncated-product estimate of a leading constant.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantEstimate {
    /// Product over primes `p <= prime_bound` (f64 view of the fixed-point
    /// accumulator).
    pub value: f64,
    /// The same value to ~30 decimal digits.
    pub value_decimal: String,
    pub prime_bound: u64,
    pub variant: ConstantVariant,
    /// Heuristic size of the neglected tail `sum_{p > P} rho/p^{kn}`;
    /// `None` when the fit is unavailable or non-convergent.
    pub tail_estimate: Option<f64>,
    /// The tail field is a log-log fit, not a certified bound; an effective
    /// bound needs constants the convergence argument does not supply.
    pub tail_estimate_note: &'static str,
    /// First prime whose local factor is zero; the product is exactly 0.
    pub vanishing_prime: Option<u64>,
    /// Set when a per-prime budget failure stopped the product early; the
    /// value is then the partial product over primes below this one.
    pub truncated_at: Option<u64>,
    pub precision_bits: u32,
    /// Optional per-prime factor table (exact rationals, rendered).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<(u64, String)>>,
}

/// Exact local factor `1 - rho/p^{kn}` (integer variant) or
/// `1 - rho*/phi(p^k)^n` (prime-input variant); a rational in `[0, 1]`.
pub fn local_factor(
    f: &MultiPoly,
    p: u64,
    k: u32,
    variant: ConstantVariant,
    budget: &Budget,
) -> Result<Ratio<BigInt>> {
    let n = f.n_vars() as u32;
    let (num, den) = match variant {
        ConstantVariant::Integer => {
            let rho = local_density::rho_prime_power(f, p, k, budget)?;
            (rho, BigUint::from(p).pow(k * n))
        }
        ConstantVariant::PrimeInput => {
            let rho = local_density::rho_star(f, p, k, RhoStarConvention::CoprimeToP, budget)?;
            (rho, phi_prime_power(p, k).pow(n))
        }
    };
    let ratio = Ratio::new(BigInt::from(num), BigInt::from(den));
    Ok(Ratio::one() - ratio)
}

/// Truncated product over primes `p <= prime_bound` in fixed-point
/// arithmetic with the default 128-bit precision.
pub fn constant_c(
    f: &MultiPoly,
    k: u32,
    prime_bound: u64,
    variant: ConstantVariant,
    budget: &Budget,
) -> Result<ConstantEstimate> {
    constant_c_with_options(f, k, prime_bound, variant, budget, DEFAULT_PRECISION_BITS, false)
}

pub fn constant_c_with_options(
    f: &MultiPoly,
    k: u32,
    prime_bound: u64,
    variant: ConstantVariant,
    budget: &Budget,
    precision_bits: u32,
    collect_factors: bool,
) -> Result<ConstantEstimate> {
    if k < 2 {
        return Err(Error::InvalidParameter("constant needs k >= 2".into()));
    }
    if prime_bound < 2 {
        return Err(Error::InvalidParameter("prime bound must be >= 2".into()));
    }
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "constant undefined for the zero polynomial".into(),
        ));
    }
    let primes = primes_up_to(prime_bound);
    let mut acc = Fixed::one(precision_bits);
    let mut vanishing = None;
    let mut truncated = None;
    let mut factors = if collect_factors { Some(Vec::new()) } else { None };
    // local factors for distinct primes are independent: compute them in
    // parallel chunks, then multiply in fixed ascending order
    'chunks: for chunk in primes.chunks(2048) {
        let computed: Vec<(u64, Result<Ratio<BigInt>>)> = chunk
            .par_iter()
            .map(|&p| (p, local_factor(f, p, k, variant, budget)))
            .collect();
        for (p, factor) in computed {
            let factor = match factor {
                Ok(r) => r,
                Err(Error::BudgetExceeded { .. }) => {
                    truncated = Some(p);
                    break 'chunks;
                }
                Err(e) => return Err(e),
            };
            if let Some(table) = factors.as_mut() {
                table.push((p, factor.to_string()));
            }
            if factor.is_zero() {
                vanishing = Some(p);
                acc = Fixed::zero(precision_bits);
                break 'chunks;
            }
            let num = factor.numer().magnitude().clone();
            let den = factor.denom().magnitude().clone();
            acc.mul_ratio(&num, &den);
        }
    }
    let tail_estimate = if vanishing.is_none() && truncated.is_none() {
        estimate_tail(f, k, prime_bound, variant, budget)
    } else {
        None
    };
    Ok(ConstantEstimate {
        value: acc.to_f64(),
        value_decimal: acc.to_decimal(30),
        prime_bound,
        variant,
        tail_estimate,
        tail_estimate_note: TAIL_NOTE,
        vanishing_prime: vanishing,
        truncated_at: truncated,
        precision_bits,
        factors,
    })
}

/// Exact rational truncated product; restricted to small prime bounds where
/// the exact numerator and denominator stay manageable.
pub fn constant_c_exact(
    f: &MultiPoly,
    k: u32,
    prime_bound: u64,
    variant: ConstantVariant,
    budget: &Budget,
) -> Result<Ratio<BigInt>> {
    if prime_bound > 1000 {
        return Err(Error::InvalidParameter(
            "exact accumulation is limited to prime bounds <= 1000".into(),
        ));
    }
    let mut acc = Ratio::one();
    for p in primes_up_to(prime_bound) {
        let factor = local_factor(f, p, k, variant, budget)?;
        if factor.is_zero() {
            return Ok(Ratio::zero());
        }
        acc *= factor;
    }
    Ok(acc)
}

/// Positivity report: every local factor for `p <= P` positive?
#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub failing_prime: Option<u64>,
    pub prime_bound: u64,
}

pub fn positivity_certificate(
    f: &MultiPoly,
    k: u32,
    prime_bound: u64,
    budget: &Budget,
) -> Result<PositivityReport> {
    for p in primes_up_to(prime_bound) {
        if !local_density::is_admissible(f, p, k, budget)? {
            return Ok(PositivityReport {
                positive: false,
                failing_prime: Some(p),
                prime_bound,
            });
        }
    }
    Ok(PositivityReport {
        positive: true,
        failing_prime: None,
        prime_bound,
    })
}

fn estimate_tail(
    f: &MultiPoly,
    k: u32,
    prime_bound: u64,
    variant: ConstantVariant,
    budget: &Budget,
) -> Option<f64> {
    let n = f.n_vars() as u32;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut last = prime_bound;
    for j in 1..=12u64 {
        let target = prime_bound + j * (3 * prime_bound) / 12;
        let q = next_prime_u64(target.max(last));
        if q > 4 * prime_bound || q <= last {
            continue;
        }
        last = q;
        let ratio = match variant {
            ConstantVariant::Integer => {
                let rho = local_density::rho_prime_power(f, q, k, budget).ok()?;
                rho.to_f64()? / (q as f64).powi((k * n) as i32)
            }
            ConstantVariant::PrimeInput => {
                let rho =
                    local_density::rho_star(f, q, k, RhoStarConvention::CoprimeToP, budget).ok()?;
                rho.to_f64()? / phi_prime_power(q, k).pow(n).to_f64()?
            }
        };
        if ratio > 0.0 {
            samples.push(((q as f64).ln(), ratio.ln()));
        }
    }
    if samples.is_empty() {
        return Some(0.0);
    }
    if samples.len() < 2 {
        return None;
    }
    // least squares: ln r = ln a - s ln p
    let m = samples.len() as f64;
    let sx: f64 = samples.iter().map(|(x, _)| x).sum();
    let sy: f64 = samples.iter().map(|(_, y)| y).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = samples.iter().map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let s = -slope;
    let a = intercept.exp();
    if !(s > 1.01) {
        return None; // fitted decay too slow for a convergent tail
    }
    // sum_{p > P} a p^{-s} ~ a * int_P^inf x^{-s}/ln x dx; substitute x=e^u
    let lower = (prime_bound as f64).ln();
    let upper = lower + 80.0 / (s - 1.0);
    let g = |u: f64| ((1.0 - s) * u).exp() / u;
    Some(a * simpson(g, lower, upper, 4096))
}

fn simpson<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = g(a) + g(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        acc += g(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Nonnegative fixed-point number `mant / 2^bits`, used to accumulate a
/// product of factors in `[0, 1]` with floor rounding at each step.
struct Fixed {
    bits: u32,
    mant: BigUint,
}

impl Fixed {
    fn one(bits: u32) -> Self {
        Fixed {
            bits,
            mant: BigUint::one() << bits,
        }
    }

    fn zero(bits: u32) -> Self {
        Fixed {
            bits,
            mant: BigUint::zero(),
        }
    }

    fn mul_ratio(&mut self, num: &BigUint, den: &BigUint) {
        self.mant = (&self.mant * num) / den;
    }

    fn to_f64(&self) -> f64 {
        let num = self.mant.to_f64().unwrap_or(f64::INFINITY);
        num / 2f64.powi(self.bits as i32)
    }

    fn to_decimal(&self, digits: u32) -> String {
        let int = &self.mant >> self.bits;
        let frac = &self.mant - (&int << self.bits);
        let scaled = (frac * BigUint::from(10u32).pow(digits)) >> self.bits;
        let mut s = scaled.to_string();
        while (s.len() as u32) < digits {
            s.insert(0, '0');
        }
        format!("{int}.{s}")
    }
}
