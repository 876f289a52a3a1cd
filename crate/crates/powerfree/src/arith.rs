//! Integer plumbing: prime sieves, primality tests, factorization, the
//! Möbius function and a few root helpers.
//!
//! Factorization strategy: trial division by sieved primes up to 10^6, a
//! perfect-power pre-check, then Pollard rho with Brent's cycle detection on
//! the cofactor. Primality is deterministic Miller-Rabin for 64-bit inputs
//! and fixed-witness Miller-Rabin above that.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Trial-division bound used by the factorization engine.
pub const TRIAL_LIMIT: u64 = 1_000_000;

// Gives up on semiprimes whose factors both exceed ~10^22, i.e. values
// beyond ~10^44 — far past desk scale.
const BIG_RHO_MAX_ITERS: u64 = 500_000;

/// All primes `<= limit` by a sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    assert!(limit <= 200_000_000, "sieve limit {limit} unreasonably large");
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        if i as u64 * i as u64 > limit {
            break;
        }
    }
    // The loop above stops marking once i^2 > limit; collect the rest.
    let start = primes.last().map_or(2, |&p| p as usize + 1);
    for i in start..=n {
        if !composite[i] {
            primes.push(i as u64);
        }
    }
    primes
}

/// Möbius function on `[0, limit]` by a linear sieve. `mu[0]` is 0.
pub fn mobius_up_to(limit: u64) -> Vec<i8> {
    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    if n >= 1 {
        mu[1] = 1;
    }
    let mut primes: Vec<usize> = Vec::new();
    let mut lp = vec![0usize; n + 1];
    for i in 2..=n {
        if lp[i] == 0 {
            lp[i] = i;
            mu[i] = -1;
            primes.push(i);
        }
        for &p in &primes {
            if p > lp[i] || i * p > n {
                break;
            }
            lp[i * p] = p;
            mu[i * p] = if p == lp[i] { 0 } else { -mu[i] };
        }
    }
    mu
}

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // Witness set proven complete for all n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_u64(n: u64) -> u64 {
    let mut c = n + 1;
    if c <= 2 {
        return 2;
    }
    if c % 2 == 0 {
        c += 1;
    }
    while !is_prime_u64(c) {
        c += 2;
    }
    c
}

/// Miller-Rabin with a fixed witness set; probabilistic above 64 bits.
pub fn is_prime_bigint(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let two = &one + &one;
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [
        2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent_u64(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 == 1);
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut q = 1u64;
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = y;
        while d == 1 {
            x = y;
            for _ in 0..r {
                y = (mulmod_u64(y, y, n) + c) % n;
            }
            let mut k = 0;
            while k < r && d == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = (mulmod_u64(y, y, n) + c) % n;
                    q = mulmod_u64(q, x.abs_diff(y), n);
                }
                d = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if d == n {
            // Backtrack one step at a time.
            loop {
                ys = (mulmod_u64(ys, ys, n) + c) % n;
                d = gcd_u64(x.abs_diff(ys), n);
                if d > 1 {
                    break;
                }
            }
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Full factorization of a nonzero `u64`, sorted by prime.
pub fn factor_u64(mut v: u64) -> Vec<(u64, u32)> {
    assert!(v > 0, "factor_u64 requires a positive value");
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in trial_primes() {
        if p * p > v {
            break;
        }
        if v % p == 0 {
            let mut e = 0u32;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            out.push((p, e));
        }
        if v == 1 {
            break;
        }
    }
    if v > 1 {
        factor_u64_core(v, &mut out);
        out.sort_unstable();
        // Merge exponents of equal primes produced by independent splits.
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
        for (p, e) in out {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        return merged;
    }
    out
}

fn factor_u64_core(v: u64, out: &mut Vec<(u64, u32)>) {
    if v == 1 {
        return;
    }
    if is_prime_u64(v) {
        out.push((v, 1));
        return;
    }
    // Perfect-power pre-check: rho behaves poorly on p^e.
    for e in [2u32, 3, 5, 7] {
        let r = v.nth_root(e);
        if r.checked_pow(e) == Some(v) {
            let mut inner = Vec::new();
            factor_u64_core(r, &mut inner);
            for (p, f) in inner {
                out.push((p, f * e));
            }
            return;
        }
    }
    let d = pollard_brent_u64(v);
    factor_u64_core(d, out);
    factor_u64_core(v / d, out);
}

fn pollard_brent_bigint(n: &BigUint, max_iters: u64) -> Result<BigUint> {
    let one = BigUint::one();
    let mut c = BigUint::one();
    let mut iters = 0u64;
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut ys = y.clone();
        let mut d = BigUint::one();
        let mut q = BigUint::one();
        let mut r = 1u64;
        let m = 128u64;
        while d == one {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0;
            while k < r && d == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * diff) % n;
                }
                d = q.gcd(n);
                k += m;
                iters += m;
                if iters > max_iters {
                    return Err(Error::FactorizationTimeout {
                        bits: n.bits(),
                        iterations: iters,
                        point: None,
                    });
                }
            }
            r *= 2;
        }
        if &d == n {
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                d = diff.gcd(n);
                iters += 1;
                if d > one {
                    break;
                }
                if iters > max_iters {
                    return Err(Error::FactorizationTimeout {
                        bits: n.bits(),
                        iterations: iters,
                        point: None,
                    });
                }
            }
        }
        if &d != n {
            return Ok(d);
        }
        c += 1u32;
    }
}

/// Full factorization of `|v|` for nonzero `v`, sorted by prime.
///
/// Values above 64 bits go through big-integer Pollard rho with an iteration
/// cap; exceeding it reports a timeout so callers can flag the offending
/// point instead of hanging.
pub fn factor_bigint(v: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    let mut n = v.magnitude().clone();
    assert!(!n.is_zero(), "factor_bigint requires a nonzero value");
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect());
    }
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for &p in trial_primes() {
        let pb = BigUint::from(p);
        if (&pb * &pb) > n {
            break;
        }
        if (&n % &pb).is_zero() {
            let mut e = 0u32;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        if let Some(small) = n.to_u64() {
            if small > 1 {
                for (q, f) in factor_u64(small) {
                    out.push((BigUint::from(q), f));
                }
            }
            out.sort();
            return Ok(out);
        }
    }
    factor_bigint_core(n, &mut out)?;
    out.sort();
    let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(merged)
}

fn factor_bigint_core(v: BigUint, out: &mut Vec<(BigUint, u32)>) -> Result<()> {
    if v.is_one() {
        return Ok(());
    }
    if let Some(small) = v.to_u64() {
        for (p, e) in factor_u64(small) {
            out.push((BigUint::from(p), e));
        }
        return Ok(());
    }
    if is_prime_bigint(&v) {
        out.push((v, 1));
        return Ok(());
    }
    let max_e = v.bits() as u32;
    for e in 2..=max_e {
        let r = v.nth_root(e);
        if r.pow(e) == v {
            let mut inner = Vec::new();
            factor_bigint_core(r, &mut inner)?;
            for (p, f) in inner {
                out.push((p, f * e));
            }
            return Ok(());
        }
        if r < BigUint::from(2u32) {
            break;
        }
    }
    let d = pollard_brent_bigint(&v, BIG_RHO_MAX_ITERS)?;
    let q = &v / &d;
    factor_bigint_core(d, out)?;
    factor_bigint_core(q, out)
}

/// Exact p-adic valuation of a nonzero integer.
pub fn valuation(v: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut n = v.abs();
    let mut e = 0u32;
    while !n.is_zero() {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        n = q;
        e += 1;
    }
    e
}

/// `phi(p^k) = p^k - p^{k-1}` as a big integer.
pub fn phi_prime_power(p: u64, k: u32) -> BigUint {
    let p = BigUint::from(p);
    p.pow(k) - p.pow(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_known_counts() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(1).len(), 0);
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn mobius_small_values() {
        let mu = mobius_up_to(12);
        assert_eq!(&mu[1..=12], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = primes_up_to(2000);
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), primes.binary_search(&n).is_ok(), "n={n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factor_u64_roundtrip() {
        for v in [2u64, 12, 720, 1_000_003, 2u64.pow(40), 999_999_999_989] {
            let f = factor_u64(v);
            let back: u64 = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, v);
            for (p, _) in &f {
                assert!(is_prime_u64(*p));
            }
        }
        // semiprime with both factors above the trial bound
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        assert_eq!(factor_u64(p * q), vec![(p, 1), (q, 1)]);
    }

    #[test]
    fn factor_bigint_large_square() {
        let p = BigUint::from(1_000_000_007u64);
        let v = BigInt::from(p.clone()) * BigInt::from(p.clone()) * BigInt::from(13u32);
        let f = factor_bigint(&v).unwrap();
        assert_eq!(f, vec![(BigUint::from(13u32), 1), (p, 2)]);
    }

    #[test]
    fn valuation_basics() {
        assert_eq!(valuation(&BigInt::from(-24), 2), 3);
        assert_eq!(valuation(&BigInt::from(24), 3), 1);
        assert_eq!(valuation(&BigInt::from(7), 5), 0);
    }
}
