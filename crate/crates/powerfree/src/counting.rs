//! Exact reference counters: k-free testing, `N_{F,k}(B)`, the prime-input
//! count, divisibility counts `N(B; h)` and the theorem-applicability
//! checker.
//!
//! Points with `F(x) = 0` are never counted as k-free and are excluded from
//! `N(B; h)` as well, tallied separately: zero is divisible by every prime
//! power, and keeping zeros would make the finite Möbius identity diverge.

use crate::arith::{self, factor_u64, TRIAL_LIMIT};
use crate::error::{Error, Result};
use crate::polynomial::{LatticeBox, MultiPoly};
use crate::scan::{self, Value};
use crate::Budget;
use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::time::Instant;

/// Outcome of the k-free predicate on a single integer.
#[derive(Debug, Clone)]
pub struct KFreeOutcome {
    pub value: BigInt,
    pub k: u32,
    pub is_kfree: bool,
    /// A prime `p` with `p^k` dividing `|value|`, when one exists.
    pub witness: Option<BigUint>,
    pub zero_value: bool,
}

/// Result of a box or prime-tuple count.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub count: u64,
    /// Lattice points with `F = 0`, excluded from `count`.
    pub zero_points: u64,
    pub bounds: Vec<i64>,
    pub k: u32,
    pub prime_inputs: bool,
    pub include_negative_primes: bool,
    /// Set when the primitive part of `F` is a nontrivial k-th power, in
    /// which case the leading-constant asymptotic cannot hold as stated.
    pub perfect_power_degeneracy: bool,
    pub elapsed_s: f64,
}

/// Which of the three asymptotic statements applies to `(n, d, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremTags {
    /// Integer inputs, `k >= (3d+1)/4`.
    pub mt1: bool,
    /// Prime inputs, same range of `k`.
    pub mt2: bool,
    /// `k = d - 1` with `d >= 3`.
    pub mt3: bool,
}

/// k-free test by factorization: trial division by sieved primes, a
/// perfect-power pre-check, then Pollard rho on the cofactor.
pub fn is_kfree(v: &BigInt, k: u32) -> Result<KFreeOutcome> {
    if k < 2 {
        return Err(Error::InvalidParameter("k-free testing needs k >= 2".into()));
    }
    if v.is_zero() {
        return Ok(KFreeOutcome {
            value: v.clone(),
            k,
            is_kfree: false,
            witness: None,
            zero_value: true,
        });
    }
    let factors = arith::factor_bigint(v)?;
    let witness = factors.iter().find(|(_, e)| *e >= k).map(|(p, _)| p.clone());
    Ok(KFreeOutcome {
        value: v.clone(),
        k,
        is_kfree: witness.is_none(),
        witness,
        zero_value: false,
    })
}

/// Streamed k-free test for nonzero `|v|` in 64 bits: trial division up to
/// `|v|^(1/(k+1))` leaves a cofactor with at most k prime factors, which
/// then contains a k-th power iff it is itself one.
pub(crate) fn kfree_u64(v: u64, k: u32) -> bool {
    debug_assert!(v > 0 && k >= 2);
    if v < (1u64 << k) {
        return true;
    }
    let tau = v.nth_root(k + 1);
    if tau > TRIAL_LIMIT {
        // beyond the sieve: fall back to full factorization
        return factor_u64(v).iter().all(|(_, e)| *e < k);
    }
    let mut rem = v;
    for &p in small_primes() {
        if p > tau || rem == 1 {
            break;
        }
        if rem % p == 0 {
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            if e >= k {
                return false;
            }
        }
    }
    if rem > 1 {
        let r = rem.nth_root(k);
        if r > 1 && r.checked_pow(k) == Some(rem) {
            return false;
        }
    }
    true
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| arith::primes_up_to(TRIAL_LIMIT))
}

fn kfree_value(v: &Value<'_>, k: u32) -> Result<bool> {
    if let Some(av) = v.abs_u64() {
        Ok(kfree_u64(av, k))
    } else {
        Ok(is_kfree(&v.to_bigint(), k)?.is_kfree)
    }
}

#[derive(Default)]
struct CountAcc {
    count: u64,
    zeros: u64,
    error: Option<Error>,
}

fn merge_counts(mut a: CountAcc, b: CountAcc) -> CountAcc {
    a.count += b.count;
    a.zeros += b.zeros;
    if a.error.is_none() {
        a.error = b.error;
    }
    a
}

/// Exact `N_{F,k}(B)`: k-free values of `F` over the box, zeros excluded.
pub fn count_kfree(f: &MultiPoly, k: u32, bx: &LatticeBox, budget: &Budget) -> Result<CountReport> {
    validate_counting_input(f, k, bx)?;
    let start = Instant::now();
    let acc = scan::scan_box(
        f,
        bx,
        budget,
        CountAcc::default,
        |acc, pt, v| {
            if acc.error.is_some() {
                return;
            }
            if v.is_zero() {
                acc.zeros += 1;
            } else {
                match kfree_value(&v, k) {
                    Ok(true) => acc.count += 1,
                    Ok(false) => {}
                    Err(e) => acc.error = Some(e.at_point(pt)),
                }
            }
        },
        merge_counts,
    )?;
    if let Some(e) = acc.error {
        return Err(e);
    }
    Ok(CountReport {
        count: acc.count,
        zero_points: acc.zeros,
        bounds: bx.bounds().to_vec(),
        k,
        prime_inputs: false,
        include_negative_primes: false,
        perfect_power_degeneracy: perfect_power_degeneracy(f, k),
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

/// Exact count over tuples of primes `<= B` (positive by default; the flag
/// adds `-p` for every prime `p`).
pub fn count_kfree_prime_inputs(
    f: &MultiPoly,
    k: u32,
    b: i64,
    include_negatives: bool,
    budget: &Budget,
) -> Result<CountReport> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "counting requires a nonzero polynomial".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("counting needs k >= 2".into()));
    }
    if b < 2 {
        return Err(Error::InvalidParameter("prime bound must be >= 2".into()));
    }
    let start = Instant::now();
    let acc = scan::scan_prime_tuples(
        f,
        b,
        include_negatives,
        budget,
        CountAcc::default,
        |acc, pt, v| {
            if acc.error.is_some() {
                return;
            }
            if v.is_zero() {
                acc.zeros += 1;
            } else {
                match kfree_value(&v, k) {
                    Ok(true) => acc.count += 1,
                    Ok(false) => {}
                    Err(e) => acc.error = Some(e.at_point(pt)),
                }
            }
        },
        merge_counts,
    )?;
    if let Some(e) = acc.error {
        return Err(e);
    }
    Ok(CountReport {
        count: acc.count,
        zero_points: acc.zeros,
        bounds: vec![b; f.n_vars()],
        k,
        prime_inputs: true,
        include_negative_primes: include_negatives,
        perfect_power_degeneracy: perfect_power_degeneracy(f, k),
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

/// Divisibility count with zeros tallied separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisibleCount {
    pub count: u64,
    pub zero_points: u64,
}

/// `N(B; h)`: points with `h^k | F(x)` and `F(x) != 0`.
pub fn count_divisible(
    f: &MultiPoly,
    h: u64,
    k: u32,
    bx: &LatticeBox,
    prime_inputs: bool,
    budget: &Budget,
) -> Result<DivisibleCount> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "counting requires a nonzero polynomial".into(),
        ));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("divisibility counts need k >= 1".into()));
    }
    if bx.n_vars() != f.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: f.n_vars(),
            got: bx.n_vars(),
        });
    }
    if h == 0 {
        return Err(Error::InvalidParameter("divisor h must be positive".into()));
    }
    let modulus = BigInt::from(h).pow(k);
    let modulus_small = modulus.to_i64();
    let per_point = |acc: &mut CountAcc, _pt: &[i64], v: Value<'_>| {
        if v.is_zero() {
            acc.zeros += 1;
            return;
        }
        let divisible = match (&v, modulus_small) {
            (Value::Small(x), Some(m)) => x % m == 0,
            _ => (v.to_bigint() % &modulus).is_zero(),
        };
        if divisible {
            acc.count += 1;
        }
    };
    let acc = if prime_inputs {
        scan::scan_prime_tuples(
            f,
            bx.bounds()[0],
            false,
            budget,
            CountAcc::default,
            per_point,
            merge_counts,
        )?
    } else {
        scan::scan_box(f, bx, budget, CountAcc::default, per_point, merge_counts)?
    };
    Ok(DivisibleCount {
        count: acc.count,
        zero_points: acc.zeros,
    })
}

/// Which theorems apply, by exact rational comparison: MT1/MT2 need
/// `4k >= 3d + 1`, MT3 needs `d >= 3` and `k = d - 1`.
pub fn applicability(n: usize, d: u32, k: u32) -> Result<TheoremTags> {
    if n < 1 || d < 2 || k < 2 {
        return Err(Error::InvalidParameter(
            "applicability needs n >= 1, d >= 2, k >= 2".into(),
        ));
    }
    let k_large_enough = 4 * k >= 3 * d + 1;
    Ok(TheoremTags {
        mt1: k_large_enough,
        mt2: k_large_enough,
        mt3: d >= 3 && k == d - 1,
    })
}

fn validate_counting_input(f: &MultiPoly, k: u32, bx: &LatticeBox) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "counting requires a nonzero polynomial".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("counting needs k >= 2".into()));
    }
    if bx.n_vars() != f.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: f.n_vars(),
            got: bx.n_vars(),
        });
    }
    Ok(())
}

fn perfect_power_degeneracy(f: &MultiPoly, k: u32) -> bool {
    f.kth_root_of_primitive_part(k)
        .map(|g| g.degree() >= 1)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(text: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(text, n).unwrap()
    }

    #[test]
    fn is_kfree_spec_examples() {
        let o = is_kfree(&BigInt::from(12), 2).unwrap();
        assert!(!o.is_kfree);
        assert_eq!(o.witness, Some(BigUint::from(2u32)));

        assert!(is_kfree(&BigInt::from(12), 3).unwrap().is_kfree);

        let z = is_kfree(&BigInt::from(0), 2).unwrap();
        assert!(!z.is_kfree && z.zero_value && z.witness.is_none());

        let n = is_kfree(&BigInt::from(-8), 3).unwrap();
        assert!(!n.is_kfree);
        assert_eq!(n.witness, Some(BigUint::from(2u32)));
    }

    #[test]
    fn kfree_u64_matches_factorization() {
        for v in 1..=5000u64 {
            for k in [2u32, 3, 4] {
                let naive = factor_u64(v).iter().all(|(_, e)| *e < k);
                assert_eq!(kfree_u64(v, k), naive, "v={v} k={k}");
            }
        }
    }

    #[test]
    fn count_kfree_spec_examples() {
        let b = Budget::default();
        let r = count_kfree(&poly("x", 1), 2, &LatticeBox::uniform(1, 10).unwrap(), &b).unwrap();
        assert_eq!((r.count, r.zero_points), (14, 1));

        let r = count_kfree(&poly("x", 1), 3, &LatticeBox::uniform(1, 10).unwrap(), &b).unwrap();
        assert_eq!((r.count, r.zero_points), (18, 1));

        let r =
            count_kfree(&poly("x^2 + 1", 1), 2, &LatticeBox::uniform(1, 3).unwrap(), &b).unwrap();
        assert_eq!((r.count, r.zero_points), (7, 0));
    }

    #[test]
    fn count_rejects_zero_polynomial_and_small_k() {
        let b = Budget::default();
        let bx = LatticeBox::uniform(1, 3).unwrap();
        assert!(count_kfree(&poly("0", 1), 2, &bx, &b).is_err());
        assert!(count_kfree(&poly("x", 1), 1, &bx, &b).is_err());
    }

    #[test]
    fn prime_input_spec_examples() {
        let b = Budget::default();
        let r = count_kfree_prime_inputs(&poly("x", 1), 2, 10, false, &b).unwrap();
        assert_eq!(r.count, 4);

        let r = count_kfree_prime_inputs(&poly("x + 1", 1), 2, 10, false, &b).unwrap();
        assert_eq!(r.count, 2);

        let r = count_kfree_prime_inputs(&poly("x*y", 2), 2, 5, false, &b).unwrap();
        assert_eq!(r.count, 6);
    }

    #[test]
    fn signed_primes_flag() {
        let b = Budget::default();
        // F = x over +-{2,3,5,7}: all values squarefree
        let r = count_kfree_prime_inputs(&poly("x", 1), 2, 10, true, &b).unwrap();
        assert_eq!(r.count, 8);
    }

    #[test]
    fn count_divisible_spec_examples() {
        let b = Budget::default();
        let bx10 = LatticeBox::uniform(1, 10).unwrap();
        let r = count_divisible(&poly("x", 1), 2, 2, &bx10, false, &b).unwrap();
        assert_eq!((r.count, r.zero_points), (4, 1));

        let r = count_divisible(&poly("x", 1), 1, 2, &bx10, false, &b).unwrap();
        assert_eq!((r.count, r.zero_points), (20, 1));

        let bx2 = LatticeBox::uniform(2, 2).unwrap();
        let r = count_divisible(&poly("x^2 + y^2", 2), 2, 1, &bx2, false, &b).unwrap();
        assert_eq!((r.count, r.zero_points), (12, 1));
    }

    #[test]
    fn divisible_count_monotone_along_divisor_chains() {
        let b = Budget::default();
        let f = poly("x^2 + y + 3", 2);
        let bx = LatticeBox::uniform(2, 15).unwrap();
        for (h, h2) in [(1u64, 2u64), (2, 4), (3, 6), (2, 6), (5, 10)] {
            let a = count_divisible(&f, h, 2, &bx, false, &b).unwrap();
            let c = count_divisible(&f, h2, 2, &bx, false, &b).unwrap();
            assert!(c.count <= a.count, "h={h} h'={h2}");
        }
    }

    #[test]
    fn applicability_spec_examples() {
        assert_eq!(
            applicability(2, 4, 4).unwrap(),
            TheoremTags {
                mt1: true,
                mt2: true,
                mt3: false
            }
        );
        assert_eq!(
            applicability(1, 3, 2).unwrap(),
            TheoremTags {
                mt1: false,
                mt2: false,
                mt3: true
            }
        );
        assert_eq!(
            applicability(3, 2, 2).unwrap(),
            TheoremTags {
                mt1: true,
                mt2: true,
                mt3: false
            }
        );
        assert!(applicability(0, 2, 2).is_err());
    }

    #[test]
    fn perfect_power_degeneracy_flagged() {
        let b = Budget::default();
        let r = count_kfree_prime_inputs(&poly("x^2", 1), 2, 10, false, &b).unwrap();
        assert!(r.perfect_power_degeneracy);
        assert_eq!(r.count, 0);
        let r = count_kfree_prime_inputs(&poly("x^2 + 1", 1), 2, 10, false, &b).unwrap();
        assert!(!r.perfect_power_degeneracy);
    }

    #[test]
    fn even_polynomial_sign_symmetry() {
        // F even in every variable: count = 2^n * (positive-orthant count)
        // + boundary corrections, checked here by direct quadrant assembly
        let b = Budget::default();
        let f = poly("x^2*y^2 + x^2 + 1", 2);
        let bx = LatticeBox::uniform(2, 6).unwrap();
        let full = count_kfree(&f, 2, &bx, &b).unwrap();
        let mut assembled = 0u64;
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                if x >= 0 && y >= 0 {
                    let v = f.evaluate_i64(&[x, y]).unwrap();
                    if !v.is_zero() && is_kfree(&v, 2).unwrap().is_kfree {
                        let mult = (if x > 0 { 2 } else { 1 }) * (if y > 0 { 2 } else { 1 });
                        assembled += mult;
                    }
                }
            }
        }
        assert_eq!(full.count, assembled);
    }

    #[test]
    fn factorization_timeout_carries_the_point() {
        use crate::arith::is_prime_bigint;
        use num_bigint::BigUint;
        // a semiprime with two ~30-digit prime factors defeats Pollard rho
        // within the iteration cap
        let find_prime = |start: BigUint| {
            let mut c = start | BigUint::from(1u32);
            while !is_prime_bigint(&c) {
                c += 2u32;
            }
            c
        };
        let p = find_prime(BigUint::from(10u32).pow(30));
        let q = find_prime(BigUint::from(10u32).pow(30) + BigUint::from(7777u32));
        let semiprime = BigInt::from(p * q);
        match is_kfree(&semiprime, 2) {
            Err(Error::FactorizationTimeout { point: None, .. }) => {}
            other => panic!("expected timeout, got {other:?}"),
        }
        // the counting path attaches the offending point
        let f = &MultiPoly::constant(1, semiprime) * &poly("x", 1);
        let bx = LatticeBox::uniform(1, 1).unwrap();
        match count_kfree(&f, 2, &bx, &Budget::default()) {
            Err(Error::FactorizationTimeout { point: Some(pt), .. }) => {
                assert_eq!(pt.len(), 1);
                assert!(pt[0] == 1 || pt[0] == -1);
            }
            other => panic!("expected timeout with point, got {other:?}"),
        }
    }

    #[test]
    fn budget_exceeded_reported() {
        let tiny = Budget::uniform(10);
        let bx = LatticeBox::uniform(2, 10).unwrap();
        assert!(matches!(
            count_kfree(&poly("x*y + 1", 2), 2, &bx, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
