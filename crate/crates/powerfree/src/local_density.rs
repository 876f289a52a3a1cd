//! Local root densities: counts of zeros of `F` modulo prime powers.
//!
//! `rho(F, m)` counts residue tuples in `(Z/m)^n` with `F ≡ 0 (mod m)`;
//! `rho_star` restricts coordinates to units (or to pairwise-coprime
//! representatives under the literal convention). Prime powers are counted
//! by Hensel lifting: nonsingular roots mod p contribute `p^{(n-1)(k-1)}`
//! lifts each, singular roots are expanded exactly via
//! `F(x0 + p*y) = F(x0) + p^2*H(y)` and recursion on `H`. Residue
//! representatives are `0..m-1` throughout.

use crate::arith::{self, factor_u64, is_prime_u64, phi_prime_power};
use crate::error::{Error, Result};
use crate::modp::{parallel_count_roots, scan_common_roots, ModPoly, PolyGf, RangeEval};
use crate::polynomial::MultiPoly;
use crate::Budget;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Reading of the prime-input density's coprimality condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoStarConvention {
    /// No coordinate divisible by p (the convention matching the
    /// `phi(p^k)^n` normalization); the default.
    CoprimeToP,
    /// Pairwise-coprime residue representatives, read literally.
    PairwiseCoprime,
}

/// Per-prime density summary.
#[derive(Debug, Clone)]
pub struct LocalDensityRecord {
    pub p: u64,
    pub k: u32,
    pub rho: BigUint,
    pub rho_star: BigUint,
    pub admissible: bool,
    pub phi_pk_n: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Filter {
    All,
    Units,
}

#[derive(Debug, Default)]
struct BaseRoots {
    total: u64,
    nonsingular: u64,
    singular: Vec<Vec<u64>>,
}

const UNIVARIATE_SCAN_MAX: u64 = 1 << 11;
const SEPARABLE_MIN_P: u64 = 1 << 6;
const SEPARABLE_MAX_P: u64 = 1 << 25;
const SINGULAR_CAP: usize = 1 << 20;

/// `rho_F(m)`: zeros of `F` in `(Z/m)^n`.
///
/// Prime powers go through the lifting path; other moduli are enumerated
/// directly (`m^n` work, budget-checked).
pub fn rho(f: &MultiPoly, m: u64, budget: &Budget) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidParameter("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(BigUint::one());
    }
    let fac = factor_u64(m);
    if fac.len() == 1 {
        return rho_prime_power(f, fac[0].0, fac[0].1, budget);
    }
    let n = f.n_vars() as u32;
    budget.check_tuples((m as u128).pow(n))?;
    let fp = ModPoly::from_poly(f, m);
    let count = parallel_count_roots(&[&fp], false, |_| 1);
    Ok(BigUint::from(count))
}

/// `rho_F(p^k)` via Hensel lifting with exact singular-branch expansion.
pub fn rho_prime_power(f: &MultiPoly, p: u64, k: u32, budget: &Budget) -> Result<BigUint> {
    ensure_prime(p)?;
    if k == 0 {
        return Ok(BigUint::one());
    }
    rho_pk_inner(f, p, k, budget)
}

fn rho_pk_inner(f: &MultiPoly, p: u64, k: u32, budget: &Budget) -> Result<BigUint> {
    let n = f.n_vars() as u32;
    if f.is_zero() {
        return Ok(BigUint::from(p).pow(k * n));
    }
    let e = content_valuation(f, p, k);
    if e >= k {
        return Ok(BigUint::from(p).pow(k * n));
    }
    let reduced = if e > 0 {
        f.div_exact(&BigInt::from(p).pow(e))
    } else {
        f.clone()
    };
    let inner = count_lifted(&reduced, p, k - e, Filter::All, budget)?;
    Ok(BigUint::from(p).pow(e * n) * inner)
}

/// `rho*_F(p^k)` under the chosen coprimality convention.
pub fn rho_star(
    f: &MultiPoly,
    p: u64,
    k: u32,
    convention: RhoStarConvention,
    budget: &Budget,
) -> Result<BigUint> {
    ensure_prime(p)?;
    if k == 0 {
        return Ok(BigUint::one());
    }
    let n = f.n_vars() as u32;
    match convention {
        RhoStarConvention::CoprimeToP => {
            if f.is_zero() {
                return Ok(phi_prime_power(p, k).pow(n));
            }
            let e = content_valuation(f, p, k);
            if e >= k {
                return Ok(phi_prime_power(p, k).pow(n));
            }
            let reduced = if e > 0 {
                f.div_exact(&BigInt::from(p).pow(e))
            } else {
                f.clone()
            };
            let inner = count_lifted(&reduced, p, k - e, Filter::Units, budget)?;
            Ok(BigUint::from(p).pow(e * n) * inner)
        }
        RhoStarConvention::PairwiseCoprime => {
            let m = checked_prime_power(p, k)?;
            budget.check_tuples((m as u128).pow(n))?;
            let fp = ModPoly::from_poly(f, m);
            let count =
                parallel_count_roots(&[&fp], false, |pt| pairwise_coprime(pt) as u64);
            Ok(BigUint::from(count))
        }
    }
}

/// Univariate density `rho_f(p^k)`; errors if `f ≡ 0 (mod p)`.
pub fn rho_univariate(f: &MultiPoly, p: u64, k: u32, budget: &Budget) -> Result<BigUint> {
    if f.n_vars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.n_vars(),
        });
    }
    ensure_prime(p)?;
    if ModPoly::from_poly(f, p).is_zero() {
        return Err(Error::DegenerateModP { p });
    }
    if k == 0 {
        return Ok(BigUint::one());
    }
    count_lifted(f, p, k, Filter::All, budget)
}

/// True iff some residue tuple has `p^k` not dividing `F`, i.e.
/// `rho_F(p^k) < p^{kn}`.
pub fn is_admissible(f: &MultiPoly, p: u64, k: u32, budget: &Budget) -> Result<bool> {
    let r = rho_prime_power(f, p, k, budget)?;
    Ok(r < BigUint::from(p).pow(k * f.n_vars() as u32))
}

pub fn local_density_record(
    f: &MultiPoly,
    p: u64,
    k: u32,
    budget: &Budget,
) -> Result<LocalDensityRecord> {
    let n = f.n_vars() as u32;
    let rho_v = rho_prime_power(f, p, k, budget)?;
    let rho_star_v = rho_star(f, p, k, RhoStarConvention::CoprimeToP, budget)?;
    let admissible = rho_v < BigUint::from(p).pow(k * n);
    Ok(LocalDensityRecord {
        p,
        k,
        rho: rho_v,
        rho_star: rho_star_v,
        admissible,
        phi_pk_n: phi_prime_power(p, k).pow(n),
    })
}

fn ensure_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{p} is not prime")))
    }
}

fn checked_prime_power(p: u64, k: u32) -> Result<u64> {
    let mut m = 1u64;
    for _ in 0..k {
        m = m.checked_mul(p).ok_or_else(|| Error::BudgetExceeded {
            required: u128::MAX,
            budget: 0,
        })?;
    }
    Ok(m)
}

fn pairwise_coprime(pt: &[u64]) -> bool {
    for i in 0..pt.len() {
        for j in i + 1..pt.len() {
            if pt[i].gcd(&pt[j]) != 1 {
                return false;
            }
        }
    }
    true
}

/// Minimum p-adic valuation over all coefficients, capped at `cap`.
fn content_valuation(f: &MultiPoly, p: u64, cap: u32) -> u32 {
    let mut min = cap;
    for (_, c) in f.terms() {
        let v = valuation_capped(c, p, min);
        if v < min {
            min = v;
            if min == 0 {
                break;
            }
        }
    }
    min
}

fn valuation_capped(c: &BigInt, p: u64, cap: u32) -> u32 {
    let pb = BigInt::from(p);
    let mut n = c.clone();
    let mut e = 0u32;
    while e < cap {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        n = q;
        e += 1;
    }
    e
}

/// Count zeros of `f` in `(Z/p^k)^n` given `f` not identically zero mod p,
/// restricting base coordinates per `filter` (the restriction is a mod-p
/// condition, so it is preserved by lifting).
fn count_lifted(
    f: &MultiPoly,
    p: u64,
    k: u32,
    filter: Filter,
    budget: &Budget,
) -> Result<BigUint> {
    debug_assert!(k >= 1);
    let n = f.n_vars() as u32;
    let base = base_roots(f, p, filter, k >= 2, budget)?;
    if k == 1 {
        return Ok(BigUint::from(base.total));
    }
    let pb = BigUint::from(p);
    let mut acc = BigUint::from(base.nonsingular) * pb.pow((n - 1) * (k - 1));
    if !base.singular.is_empty() {
        let pn = pb.pow(n);
        for x0 in &base.singular {
            let pt: Vec<BigInt> = x0.iter().map(|&v| BigInt::from(v)).collect();
            let c = f.evaluate(&pt)?;
            if !c.is_zero() && arith::valuation(&c, p) < 2 {
                continue;
            }
            if k == 2 {
                acc += &pn;
                continue;
            }
            let h = shift_scale_divide(f, x0, p)?;
            acc += &pn * rho_pk_inner(&h, p, k - 2, budget)?;
        }
    }
    Ok(acc)
}

/// `F(x0 + p*y) / p^2`, exact when `x0` is a singular root of `F` mod p
/// with `p^2 | F(x0)`.
fn shift_scale_divide(f: &MultiPoly, x0: &[u64], p: u64) -> Result<MultiPoly> {
    let n = f.n_vars();
    let mut images = Vec::with_capacity(n);
    for (i, &c) in x0.iter().enumerate() {
        let var = MultiPoly::variable(n, i + 1)?;
        let scaled = &MultiPoly::constant(n, BigInt::from(p)) * &var;
        images.push(&scaled + &MultiPoly::constant(n, BigInt::from(c)));
    }
    let shifted = f.substitute(n, &images)?;
    Ok(shifted.div_exact(&(BigInt::from(p) * BigInt::from(p))))
}

fn base_roots(
    f: &MultiPoly,
    p: u64,
    filter: Filter,
    need_classification: bool,
    budget: &Budget,
) -> Result<BaseRoots> {
    let n = f.n_vars();
    if n == 1 {
        if p > UNIVARIATE_SCAN_MAX {
            if let Some(base) = base_roots_univariate_gcd(f, p, filter, need_classification) {
                return Ok(base);
            }
        }
        budget.check_tuples(p as u128)?;
        return base_roots_scan(f, p, filter, need_classification);
    }
    if p >= SEPARABLE_MIN_P && p <= SEPARABLE_MAX_P {
        let tails = (p as u128).pow(n as u32 - 1);
        if tails <= budget.tuples as u128 {
            if let Some(split) = SeparableSplit::find(f, p) {
                if let Some(base) = base_roots_separable(&split, p, filter) {
                    return Ok(base);
                }
            }
        }
    }
    budget.check_tuples((p as u128).pow(n as u32))?;
    base_roots_scan(f, p, filter, need_classification)
}

/// Full scan over `[0,p)^n` classifying every root by its gradient mod p.
fn base_roots_scan(
    f: &MultiPoly,
    p: u64,
    filter: Filter,
    need_classification: bool,
) -> Result<BaseRoots> {
    let n = f.n_vars();
    let fp = ModPoly::from_poly(f, p);
    let mut partials = Vec::with_capacity(n);
    for i in 1..=n {
        partials.push(ModPoly::from_poly(&f.partial_derivative(i)?, p));
    }
    let mut base = BaseRoots::default();
    let mut overflow = false;
    scan_common_roots(&[&fp], filter == Filter::Units, &mut |pt| {
        base.total += 1;
        if !need_classification {
            return;
        }
        if partials.iter().all(|g| g.eval(pt) == 0) {
            if base.singular.len() < SINGULAR_CAP {
                base.singular.push(pt.to_vec());
            } else {
                overflow = true;
            }
        } else {
            base.nonsingular += 1;
        }
    });
    if overflow {
        return Err(Error::BudgetExceeded {
            required: base.total as u128,
            budget: SINGULAR_CAP as u64,
        });
    }
    Ok(base)
}

/// Count-only fast path for univariate `f`: the number of distinct roots of
/// `f` mod p is `deg gcd(f, x^p - x)`. Returns `None` when singular roots
/// exist and actual points are needed (caller falls back to scanning).
fn base_roots_univariate_gcd(
    f: &MultiPoly,
    p: u64,
    filter: Filter,
    need_classification: bool,
) -> Option<BaseRoots> {
    let fp = ModPoly::from_poly(f, p);
    if fp.is_zero() {
        return None;
    }
    let dense = fp.dense_univariate();
    let poly = PolyGf::new(p, dense);
    if poly.deg() == Some(0) {
        return Some(BaseRoots::default());
    }
    let xp = poly.x_pow_mod(p);
    let x = PolyGf::new(p, vec![0, 1]).rem(&poly);
    let dist = PolyGf::gcd(&poly, &xp.sub(&x));
    let total = dist.deg().unwrap_or(0) as u64;
    if total == 0 {
        return Some(BaseRoots::default());
    }
    let shared = PolyGf::gcd(&dist, &poly.derivative());
    if shared.deg() != Some(0) {
        if !need_classification {
            // totals are still exact; classification fields unused
            return Some(BaseRoots {
                total: adjust_for_units(total, &poly, p, filter),
                nonsingular: 0,
                singular: Vec::new(),
            });
        }
        return None;
    }
    let adjusted = adjust_for_units(total, &poly, p, filter);
    Some(BaseRoots {
        total: adjusted,
        nonsingular: adjusted,
        singular: Vec::new(),
    })
}

fn adjust_for_units(total: u64, poly: &PolyGf, _p: u64, filter: Filter) -> u64 {
    if filter == Filter::Units && poly.eval(0) == 0 {
        total - 1
    } else {
        total
    }
}

/// Additively separable split `F = g(...) + h(x_j)` with `h` univariate.
struct SeparableSplit {
    sep_var: usize,
    h_dense: Vec<u64>,
    h_deriv: Vec<u64>,
    g: ModPoly,
    g_partials: Vec<ModPoly>,
    other_vars: Vec<usize>,
}

impl SeparableSplit {
    fn find(f: &MultiPoly, p: u64) -> Option<SeparableSplit> {
        let n = f.n_vars();
        'var: for j in 0..n {
            let mut touches = false;
            for (m, _) in f.terms() {
                if m.0[j] > 0 {
                    touches = true;
                    if m.0.iter().enumerate().any(|(i, &e)| i != j && e > 0) {
                        continue 'var;
                    }
                }
            }
            if !touches {
                continue;
            }
            // Collect h (pure x_j terms) and g (the rest, reindexed).
            let other_vars: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            let mut h_terms: Vec<(Vec<u32>, BigInt)> = Vec::new();
            let mut g_terms: Vec<(Vec<u32>, BigInt)> = Vec::new();
            for (m, c) in f.terms() {
                if m.0[j] > 0 {
                    h_terms.push((vec![m.0[j]], c.clone()));
                } else {
                    g_terms.push((other_vars.iter().map(|&i| m.0[i]).collect(), c.clone()));
                }
            }
            let h = MultiPoly::from_terms(1, h_terms).ok()?;
            let g = MultiPoly::from_terms((n - 1).max(1), g_terms).ok()?;
            let hp = ModPoly::from_poly(&h, p);
            let hd = ModPoly::from_poly(&h.partial_derivative(1).ok()?, p);
            let mut g_partials = Vec::with_capacity(n - 1);
            for i in 1..=g.n_vars() {
                g_partials.push(ModPoly::from_poly(&g.partial_derivative(i).ok()?, p));
            }
            return Some(SeparableSplit {
                sep_var: j,
                h_dense: hp.dense_univariate(),
                h_deriv: hd.dense_univariate(),
                g: ModPoly::from_poly(&g, p),
                g_partials,
                other_vars,
            });
        }
        None
    }
}

const BUCKET_BITS: u32 = 8;

fn bucket_shift(p: u64) -> u32 {
    let bits = 64 - (p - 1).leading_zeros();
    bits.saturating_sub(BUCKET_BITS)
}

/// Table-driven base-root counting for separable `F = g + h(x_j)`:
/// `O(p)` table build plus `O(p^{n-1})` fiber walk instead of `O(p^n)`.
/// Table accesses go through radix buckets so each flush touches only a
/// cache-resident slice of the histogram.
fn base_roots_separable(split: &SeparableSplit, p: u64, filter: Filter) -> Option<BaseRoots> {
    let units = filter == Filter::Units;
    let start = if units { 1u64 } else { 0 };
    let shift = bucket_shift(p);
    let n_buckets = (((p - 1) >> shift) + 1) as usize;
    let mut buckets: Vec<Vec<u32>> = (0..n_buckets).map(|_| Vec::new()).collect();

    // histogram of h values, with singular s recorded where h'(s) = 0
    let mut sing_vals: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut sing_count = 0usize;
    let mut h_eval = RangeEval::new(&split.h_dense, p);
    let mut hd_eval = RangeEval::new(&split.h_deriv, p);
    if units {
        h_eval.next_value();
        hd_eval.next_value();
    }
    for s in start..p {
        let v = h_eval.next_value();
        buckets[(v >> shift) as usize].push(v as u32);
        if hd_eval.next_value() == 0 {
            match sing_vals.iter_mut().find(|(r, _)| *r == v) {
                Some((_, list)) => list.push(s),
                None => sing_vals.push((v, vec![s])),
            }
            sing_count += 1;
            if sing_count > 4096 {
                return None; // h' degenerate mod p; let the caller scan
            }
        }
    }
    let mut cnt_all = vec![0u32; p as usize];
    for b in &mut buckets {
        for &v in b.iter() {
            cnt_all[v as usize] += 1;
        }
        b.clear();
    }
    let sing_targets: Vec<u64> = sing_vals.iter().map(|(v, _)| *v).collect();

    // fiber walk: r = -g(t) mod p, total += cnt_all[r]
    let mut base = BaseRoots::default();
    let mut overflow = false;
    let mut total = 0u64;
    let mut sing_adjust = 0u64;
    let n_tail = split.g.n_vars;
    let mut tail = vec![0u64; n_tail];
    walk_fibers(&split.g, units, &mut tail, 0, &mut |tail_pt, depth, dense| {
        let mut eval = RangeEval::new(dense, p);
        if units {
            eval.next_value();
        }
        for v in start..p {
            let gv = eval.next_value();
            let r = if gv == 0 { 0 } else { p - gv };
            if !sing_targets.is_empty() && sing_targets.contains(&r) {
                tail_pt[depth] = v;
                if split.g_partials.iter().all(|gp| gp.eval(tail_pt) == 0) {
                    let slist = sing_vals
                        .iter()
                        .find(|(sv, _)| *sv == r)
                        .map(|(_, l)| l.as_slice())
                        .unwrap_or(&[]);
                    for &s in slist {
                        if base.singular.len() < SINGULAR_CAP {
                            let mut point = vec![0u64; n_tail + 1];
                            for (idx, &orig) in split.other_vars.iter().enumerate() {
                                point[orig] = tail_pt[idx];
                            }
                            point[split.sep_var] = s;
                            base.singular.push(point);
                        } else {
                            overflow = true;
                        }
                    }
                    sing_adjust += slist.len() as u64;
                }
            }
            buckets[(r >> shift) as usize].push(r as u32);
        }
        for b in &mut buckets {
            for &r in b.iter() {
                total += cnt_all[r as usize] as u64;
            }
            b.clear();
        }
    });
    if overflow {
        return None;
    }
    base.total = total;
    base.nonsingular = total - sing_adjust;
    Some(base)
}

fn walk_fibers<F>(g: &ModPoly, units: bool, tail: &mut Vec<u64>, depth: usize, visit: &mut F)
where
    F: FnMut(&mut Vec<u64>, usize, &[u64]),
{
    if g.n_vars == 1 {
        let dense = g.dense_univariate();
        visit(tail, depth, &dense);
        return;
    }
    let p = g.m;
    let start = if units { 1 } else { 0 };
    for v in start..p {
        tail[depth] = v;
        let inner = g.specialize_first(v);
        walk_fibers(&inner, units, tail, depth + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(text: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(text, n).unwrap()
    }

    /// Brute-force oracle: full enumeration of `(Z/m)^n`.
    fn rho_brute(f: &MultiPoly, m: u64) -> u64 {
        let n = f.n_vars();
        let mut count = 0u64;
        let mut point = vec![0u64; n];
        loop {
            let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
            let val = f.evaluate(&pt).unwrap();
            if val.mod_floor(&BigInt::from(m)).is_zero() {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                point[i] += 1;
                if point[i] < m {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn rho_spec_examples() {
        let b = Budget::default();
        assert_eq!(rho(&poly("x", 1), 4, &b).unwrap(), BigUint::from(1u32));
        assert_eq!(rho(&poly("x^2", 1), 9, &b).unwrap(), BigUint::from(3u32));
        assert_eq!(rho(&poly("x*y", 2), 2, &b).unwrap(), BigUint::from(3u32));
        let f = poly("x^2 + y^2", 2);
        let expect = rho_brute(&f, 25);
        assert_eq!(rho(&f, 25, &b).unwrap(), BigUint::from(expect));
    }

    #[test]
    fn rho_zero_modulus_rejected() {
        assert!(matches!(
            rho(&poly("x", 1), 0, &Budget::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn rho_budget_exceeded() {
        let tiny = Budget::uniform(10);
        assert!(matches!(
            rho(&poly("x + y + z", 3), 6, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rho_star_spec_examples() {
        let b = Budget::default();
        assert_eq!(
            rho_star(&poly("x + y", 2), 3, 1, RhoStarConvention::CoprimeToP, &b).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            rho_star(&poly("x", 1), 5, 2, RhoStarConvention::CoprimeToP, &b).unwrap(),
            BigUint::from(0u32)
        );
        // frozen from the 81-tuple units-only enumeration
        assert_eq!(
            rho_star(
                &poly("x^2 + y^2 + 1", 2),
                3,
                2,
                RhoStarConvention::CoprimeToP,
                &b
            )
            .unwrap(),
            BigUint::from(12u32)
        );
    }

    #[test]
    fn rho_star_conventions_diverge() {
        // (p, 1) has pairwise gcd 1 but a coordinate divisible by p
        let b = Budget::default();
        let f = poly("x*y", 2);
        let coprime = rho_star(&f, 3, 1, RhoStarConvention::CoprimeToP, &b).unwrap();
        let pairwise = rho_star(&f, 3, 1, RhoStarConvention::PairwiseCoprime, &b).unwrap();
        assert_eq!(coprime, BigUint::from(0u32));
        assert!(pairwise > coprime);
    }

    #[test]
    fn rho_univariate_spec_examples() {
        let b = Budget::default();
        assert_eq!(
            rho_univariate(&poly("x^2 + 1", 1), 5, 2, &b).unwrap(),
            BigUint::from(2u32)
        );
        assert_eq!(
            rho_univariate(&poly("x^2", 1), 3, 2, &b).unwrap(),
            BigUint::from(3u32)
        );
        assert_eq!(
            rho_univariate(&poly("x^2 + 1", 1), 3, 1, &b).unwrap(),
            BigUint::from(0u32)
        );
        assert!(matches!(
            rho_univariate(&poly("3*x^2 + 3", 1), 3, 1, &b),
            Err(Error::DegenerateModP { p: 3 })
        ));
    }

    #[test]
    fn admissibility_spec_examples() {
        let b = Budget::default();
        assert!(!is_admissible(&poly("2*x^2 + 2*x", 1), 2, 2, &b).unwrap());
        assert!(is_admissible(&poly("x", 1), 7, 2, &b).unwrap());
        assert!(is_admissible(&poly("x^2 + y^2", 2), 2, 2, &b).unwrap());
    }

    #[test]
    fn lifting_matches_brute_force_on_prime_powers() {
        let b = Budget::default();
        let cases: Vec<(MultiPoly, u64, u32)> = vec![
            (poly("x^2 + y^2", 2), 5, 2),
            (poly("x^2 + y^2", 2), 3, 3),
            (poly("x^2 + y^2 + 1", 2), 3, 2),
            (poly("x^2*y + x + 1", 2), 3, 2),
            (poly("x^3 - y^2", 2), 2, 3),
            (poly("x^2", 1), 3, 3),
            (poly("2*x^2 + 2*x", 1), 2, 2),
            (poly("x*y*z", 3), 2, 2),
            (poly("x^2 + y^2 + z^2", 3), 3, 2),
            (poly("9*x + 3", 1), 3, 3),
        ];
        for (f, p, k) in cases {
            let m = p.pow(k);
            let got = rho_prime_power(&f, p, k, &b).unwrap();
            let want = rho_brute(&f, m);
            assert_eq!(got, BigUint::from(want), "F={f}, p={p}, k={k}");
        }
    }

    #[test]
    fn separable_path_agrees_with_scan() {
        // force the separable path with a prime above the threshold and
        // compare against the scan path (small-p clone of the same shape)
        let b = Budget::default();
        let f = poly("x^2 + y^2 + 1", 2);
        let p = 1031u64; // >= SEPARABLE_MIN_P
        let got = rho_prime_power(&f, p, 2, &b).unwrap();
        // all roots of a smooth conic mod p are nonsingular: rho(p^2) = p * rho(p)
        let base = rho_prime_power(&f, p, 1, &b).unwrap();
        assert_eq!(got, base * BigUint::from(p));
        // and rho(p) matches the direct scan path
        let scan = {
            let fp = ModPoly::from_poly(&f, p);
            let mut c = 0u64;
            scan_common_roots(&[&fp], false, &mut |_| c += 1);
            c
        };
        assert_eq!(
            rho_prime_power(&f, p, 1, &b).unwrap(),
            BigUint::from(scan)
        );
    }

    #[test]
    fn units_lifting_matches_brute_force() {
        let b = Budget::default();
        for (f, p, k) in [
            (poly("x^2 + y^2 + 1", 2), 3u64, 2u32),
            (poly("x + y", 2), 5, 2),
            (poly("x^2 - 1", 1), 2, 3),
        ] {
            let m = p.pow(k);
            let got = rho_star(&f, p, k, RhoStarConvention::CoprimeToP, &b).unwrap();
            // brute force over unit coordinates
            let n = f.n_vars();
            let mut count = 0u64;
            let mut point = vec![0u64; n];
            'outer: loop {
                if point.iter().all(|&v| v % p != 0) {
                    let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
                    if f.evaluate(&pt).unwrap().mod_floor(&BigInt::from(m)).is_zero() {
                        count += 1;
                    }
                }
                let mut i = 0;
                loop {
                    if i == n {
                        break 'outer;
                    }
                    point[i] += 1;
                    if point[i] < m {
                        break;
                    }
                    point[i] = 0;
                    i += 1;
                }
            }
            assert_eq!(got, BigUint::from(count), "F={f}, p={p}, k={k}");
        }
    }

    #[test]
    fn univariate_singular_root_at_large_prime() {
        // (x - 12345)^2 has a singular double root mod any large p; the
        // gcd fast path must fall back to the scan and lift exactly:
        // every x = 12345 + p t satisfies p^2 | f, so rho(p^2) = p
        let b = Budget::default();
        let f = poly("x^2 - 24690*x + 152399025", 1);
        let p = 100_003u64;
        assert_eq!(
            rho_univariate(&f, p, 2, &b).unwrap(),
            BigUint::from(p)
        );
        assert_eq!(rho_univariate(&f, p, 1, &b).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn separable_singular_branch_matches_brute_force() {
        // x^2 + y^3 has the singular root (0,0) mod every p; the separable
        // path must both count nonsingular roots and recurse on the branch
        let b = Budget::default();
        let f = poly("x^2 + y^3", 2);
        let p = 67u64; // above the separable threshold
        let got = rho_prime_power(&f, p, 2, &b).unwrap();
        let want = rho_brute(&f, p * p);
        assert_eq!(got, BigUint::from(want));
    }

    #[test]
    fn univariate_gcd_path_counts_large_primes() {
        let b = Budget::default();
        // x^2 + 1 mod p: two roots iff p = 1 mod 4
        assert_eq!(
            rho_univariate(&poly("x^2 + 1", 1), 1_000_003, 1, &b).unwrap(),
            BigUint::from(0u32) // 1000003 = 3 mod 4
        );
        assert_eq!(
            rho_univariate(&poly("x^2 + 1", 1), 1_000_033, 1, &b).unwrap(),
            BigUint::from(2u32) // 1000033 = 1 mod 4
        );
        assert_eq!(
            rho_univariate(&poly("x", 1), 999_983, 2, &b).unwrap(),
            BigUint::from(1u32)
        );
    }
}
