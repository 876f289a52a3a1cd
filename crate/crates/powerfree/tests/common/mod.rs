#![allow(dead_code)]

//! Independent oracles for the integration suites. Everything here is
//! deliberately naive — full enumerations, trial division by every prime,
//! Euler-Maclaurin zeta — and stays independent of the library's
//! implementation paths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use powerfree::polynomial::{LatticeBox, MultiPoly};

/// `zeta(s)` for integer `s >= 2` by Euler-Maclaurin with `N = 10^4`;
/// absolute error far below 1e-16.
pub fn zeta_em(s: u32) -> f64 {
    let s = s as f64;
    let n = 10_000f64;
    let mut sum = 0.0;
    let mut m = n - 1.0;
    while m >= 1.0 {
        sum += m.powf(-s);
        m -= 1.0;
    }
    let tail = n.powf(1.0 - s) / (s - 1.0)
        + n.powf(-s) / 2.0
        + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0;
    sum + tail
}

/// Full enumeration of `(Z/m)^n` counting zeros of `F`.
pub fn rho_brute(f: &MultiPoly, m: u64) -> u64 {
    let n = f.n_vars();
    let mb = BigInt::from(m);
    let mut count = 0u64;
    let mut point = vec![0u64; n];
    loop {
        let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
        if f.evaluate(&pt).unwrap().mod_floor(&mb).is_zero() {
            count += 1;
        }
        if !odometer(&mut point, m) {
            return count;
        }
    }
}

/// Same restricted to tuples with no coordinate divisible by p (m = p^k).
pub fn rho_star_brute_units(f: &MultiPoly, p: u64, k: u32) -> u64 {
    let n = f.n_vars();
    let m = p.pow(k);
    let mb = BigInt::from(m);
    let mut count = 0u64;
    let mut point = vec![0u64; n];
    loop {
        if point.iter().all(|&v| v % p != 0) {
            let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
            if f.evaluate(&pt).unwrap().mod_floor(&mb).is_zero() {
                count += 1;
            }
        }
        if !odometer(&mut point, m) {
            return count;
        }
    }
}

fn odometer(point: &mut [u64], m: u64) -> bool {
    for slot in point.iter_mut() {
        *slot += 1;
        if *slot < m {
            return true;
        }
        *slot = 0;
    }
    false
}

/// k-free by trial division with every candidate divisor up to sqrt.
pub fn kfree_naive(v: u64, k: u32) -> bool {
    assert!(v > 0);
    let mut rem = v;
    let mut d = 2u64;
    while d * d <= rem {
        if rem % d == 0 {
            let mut e = 0u32;
            while rem % d == 0 {
                rem /= d;
                e += 1;
            }
            if e >= k {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Exhaustive k-free count over a box, point by point.
pub fn count_kfree_brute(f: &MultiPoly, k: u32, bx: &LatticeBox) -> (u64, u64) {
    let n = f.n_vars();
    let bounds = bx.bounds();
    let mut point: Vec<i64> = bounds.iter().map(|&b| -b).collect();
    let mut count = 0u64;
    let mut zeros = 0u64;
    loop {
        let v = f.evaluate_i64(&point).unwrap();
        if v.is_zero() {
            zeros += 1;
        } else {
            let factors = factor_naive(v.magnitude().try_into().unwrap());
            if factors.iter().all(|(_, e)| *e < k) {
                count += 1;
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return (count, zeros);
            }
            point[i] += 1;
            if point[i] <= bounds[i] {
                break;
            }
            point[i] = -bounds[i];
            i += 1;
        }
    }
}

pub fn factor_naive(v: u64) -> Vec<(u64, u32)> {
    assert!(v > 0);
    let mut rem = v;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= rem {
        if rem % d == 0 {
            let mut e = 0;
            while rem % d == 0 {
                rem /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if rem > 1 {
        out.push((rem, 1));
    }
    out
}

/// Triple-loop oracle for the dyadic equation count `f(x) = v z^k`.
pub fn count_m_triple_loop(f: &MultiPoly, k: u32, b1: f64, b2: f64, b3: f64) -> u64 {
    let range = |lo: f64, hi: f64| ((lo.ceil()) as i64, (hi.ceil()) as i64 - 1);
    let (xl, xh) = range(b1 / 2.0, b1);
    let (vl, vh) = range(b2 / 2.0, b2);
    let (zl, zh) = range(b3 / 2.0, b3);
    let mut count = 0u64;
    for x in xl..=xh {
        let fx = f.evaluate_i64(&[x]).unwrap();
        for v in vl..=vh {
            for z in zl..=zh {
                if BigInt::from(v) * BigInt::from(z).pow(k) == fx {
                    count += 1;
                }
            }
        }
    }
    count
}
