//! The simple-sieve decomposition and its companions.
//!
//! Points split into classes by the prime-power divisors of `F(x)`:
//! `N1` counts points where every `p^k | F(x)` has `p > xi1`; inside `N1`,
//! `N2` has some middle prime `xi1 < p <= xi2` with `p^2 | F(x)` (square
//! divisibility, not k-th power: the asymmetry is deliberate), and `N3`
//! has no such middle square but some `p > xi2` with `p^k | F(x)`. The
//! decomposition sandwiches the k-free count:
//! `n1 - n2 - n3 <= N_{F,k}(B) <= n1`.
//!
//! Also here: the Möbius main-term estimator over small-prime moduli, the
//! codimension-2 congruence counts `N_p*` and `N_p`-dagger for the Ekedahl
//! argument, and the large-prime-power count `P(B, f)`.

use crate::arith::{factor_u64, mobius_up_to};
use crate::error::{Error, Result};
use crate::modp::{parallel_count_roots, ModPoly};
use crate::polynomial::{LatticeBox, MultiPoly};
use crate::scan::{self, Value};
use crate::Budget;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// Cutoff pair; defaults follow the two flavors' formulas.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SieveCutoffs {
    pub xi1: f64,
    pub xi2: f64,
    pub flavor: SieveFlavor,
    /// The constant in `exp(c sqrt(log B))` for the prime flavor.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SieveFlavor {
    Integer,
    PrimeInput,
}

impl SieveCutoffs {
    /// Integer flavor: `xi1 = log(B)/(nk)`, `xi2 = B sqrt(log B)`.
    pub fn integer_defaults(b: i64, n: usize, k: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter("cutoffs need B >= 2".into()));
        }
        let lb = (b as f64).ln();
        Ok(SieveCutoffs {
            xi1: lb / (n as f64 * k as f64),
            xi2: b as f64 * lb.sqrt(),
            flavor: SieveFlavor::Integer,
            c: 1.0,
        })
    }

    /// Prime flavor: `xi1' = (log B)^{n^2 k^2}`, `xi2' = B exp(-c sqrt(log B))`.
    ///
    /// These asymptotic formulas only order correctly for astronomically
    /// large `B`; at desk scale `xi1' > xi2'` and [`validate`](Self::validate)
    /// rejects the pair, so callers must override the cutoffs.
    pub fn prime_defaults(b: i64, n: usize, k: u32, c: f64) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter("cutoffs need B >= 2".into()));
        }
        let lb = (b as f64).ln();
        let exp = (n * n) as f64 * (k * k) as f64;
        Ok(SieveCutoffs {
            xi1: lb.powf(exp),
            xi2: b as f64 * (-c * lb.sqrt()).exp(),
            flavor: SieveFlavor::PrimeInput,
            c,
        })
    }

    pub fn with_overrides(mut self, xi1: Option<f64>, xi2: Option<f64>) -> Self {
        if let Some(x) = xi1 {
            self.xi1 = x;
        }
        if let Some(x) = xi2 {
            self.xi2 = x;
        }
        self
    }

    /// Cutoffs are usable when `0 < xi1 < xi2`. The integer-flavor
    /// default gives `xi1 = log(B)/(nk) < 2` at any practical `B`, leaving
    /// the small-prime range empty; that case is handled without
    /// special-casing, so only the ordering is enforced here.
    pub fn validate(&self) -> Result<()> {
        if !(self.xi1 > 0.0 && self.xi1 < self.xi2) {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must satisfy 0 < xi1 < xi2, got xi1={} xi2={}",
                self.xi1, self.xi2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    /// Passes the `xi1` condition; no middle square, no large k-th power.
    N1Only,
    /// Passes the `xi1` condition; some `p` in `(xi1, xi2]` with `p^2 | F`.
    N2,
    /// Passes the `xi1` condition, no middle square, some `p > xi2` with
    /// `p^k | F`.
    N3,
    /// Some `p <= xi1` with `p^k | F` (outside `N1`).
    ExcludedBySmallPrime,
    Zero,
}

#[derive(Debug, Clone)]
pub struct ClassifiedPoint {
    pub class: PointClass,
    /// The prime that decided the class, when one did.
    pub witness_prime: Option<BigUint>,
}

/// Classify one lattice point from the full factorization of `|F(x)|`.
pub fn classify_point(
    f: &MultiPoly,
    k: u32,
    x: &[i64],
    cutoffs: &SieveCutoffs,
) -> Result<ClassifiedPoint> {
    if k < 2 {
        return Err(Error::InvalidParameter("classification needs k >= 2".into()));
    }
    cutoffs.validate()?;
    let v = f.evaluate_i64(x)?;
    if v.is_zero() {
        return Ok(ClassifiedPoint {
            class: PointClass::Zero,
            witness_prime: None,
        });
    }
    let factors = arith_factor(&v)?;
    Ok(classify_factors(&factors, k, cutoffs))
}

fn arith_factor(v: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    crate::arith::factor_bigint(v)
}

fn classify_factors(factors: &[(BigUint, u32)], k: u32, cutoffs: &SieveCutoffs) -> ClassifiedPoint {
    // factors are sorted ascending by prime
    for (p, e) in factors {
        if *e >= k {
            let pf = p.to_f64().unwrap_or(f64::INFINITY);
            if pf <= cutoffs.xi1 {
                return ClassifiedPoint {
                    class: PointClass::ExcludedBySmallPrime,
                    witness_prime: Some(p.clone()),
                };
            }
        }
    }
    for (p, e) in factors {
        if *e >= 2 {
            let pf = p.to_f64().unwrap_or(f64::INFINITY);
            if pf > cutoffs.xi1 && pf <= cutoffs.xi2 {
                return ClassifiedPoint {
                    class: PointClass::N2,
                    witness_prime: Some(p.clone()),
                };
            }
        }
    }
    for (p, e) in factors {
        if *e >= k {
            let pf = p.to_f64().unwrap_or(f64::INFINITY);
            if pf > cutoffs.xi2 {
                return ClassifiedPoint {
                    class: PointClass::N3,
                    witness_prime: Some(p.clone()),
                };
            }
        }
    }
    ClassifiedPoint {
        class: PointClass::N1Only,
        witness_prime: None,
    }
}

/// Exact class tallies with the sandwich check against the true count.
#[derive(Debug, Clone, Serialize)]
pub struct SieveSplit {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub excluded_small: u64,
    pub zero_points: u64,
    /// `N_{F,k}(B)` recomputed independently for the sandwich check.
    pub exact_count: u64,
    pub sandwich_ok: bool,
    pub cutoffs: SieveCutoffs,
    /// Up to 10 sample points per class with the deciding prime (rendered).
    pub witnesses: Vec<(PointClass, Vec<i64>, String)>,
}

const WITNESS_CAP: usize = 10;

#[derive(Default)]
struct SplitAcc {
    n1_only: u64,
    n2: u64,
    n3: u64,
    excluded: u64,
    zeros: u64,
    kfree: u64,
    witnesses: Vec<(PointClass, Vec<i64>, String)>,
    error: Option<Error>,
}

fn merge_split(mut a: SplitAcc, b: SplitAcc) -> SplitAcc {
    a.n1_only += b.n1_only;
    a.n2 += b.n2;
    a.n3 += b.n3;
    a.excluded += b.excluded;
    a.zeros += b.zeros;
    a.kfree += b.kfree;
    a.witnesses.extend(b.witnesses);
    if a.error.is_none() {
        a.error = b.error;
    }
    a
}

/// Classify every point of the box (or every prime tuple for the prime
/// flavor) and assemble the `N1/N2/N3` decomposition.
pub fn sieve_decompose(
    f: &MultiPoly,
    k: u32,
    bx: &LatticeBox,
    cutoffs: &SieveCutoffs,
    budget: &Budget,
) -> Result<SieveSplit> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "sieving requires a nonzero polynomial".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("sieving needs k >= 2".into()));
    }
    cutoffs.validate()?;
    let per_point = |acc: &mut SplitAcc, pt: &[i64], v: Value<'_>| {
        if acc.error.is_some() {
            return;
        }
        if v.is_zero() {
            acc.zeros += 1;
            return;
        }
        let factors = match v.abs_u64() {
            Some(av) => factor_u64(av)
                .into_iter()
                .map(|(p, e)| (BigUint::from(p), e))
                .collect(),
            None => match arith_factor(&v.to_bigint()) {
                Ok(fs) => fs,
                Err(e) => {
                    acc.error = Some(e.at_point(pt));
                    return;
                }
            },
        };
        let classified = classify_factors(&factors, k, cutoffs);
        if factors.iter().all(|(_, e)| *e < k) {
            acc.kfree += 1;
        }
        match classified.class {
            PointClass::N1Only => acc.n1_only += 1,
            PointClass::N2 => acc.n2 += 1,
            PointClass::N3 => acc.n3 += 1,
            PointClass::ExcludedBySmallPrime => acc.excluded += 1,
            PointClass::Zero => unreachable!(),
        }
        if acc
            .witnesses
            .iter()
            .filter(|(cl, _, _)| *cl == classified.class)
            .count()
            < WITNESS_CAP
        {
            let prime = classified
                .witness_prime
                .map(|p| p.to_string())
                .unwrap_or_default();
            acc.witnesses.push((classified.class, pt.to_vec(), prime));
        }
    };
    let acc = match cutoffs.flavor {
        SieveFlavor::Integer => scan::scan_box(
            f,
            bx,
            budget,
            SplitAcc::default,
            per_point,
            merge_split,
        )?,
        SieveFlavor::PrimeInput => scan::scan_prime_tuples(
            f,
            bx.bounds()[0],
            false,
            budget,
            SplitAcc::default,
            per_point,
            merge_split,
        )?,
    };
    if let Some(e) = acc.error {
        return Err(e);
    }
    let n1 = acc.n1_only + acc.n2 + acc.n3;
    let sandwich_ok =
        n1 as i128 - acc.n2 as i128 - acc.n3 as i128 <= acc.kfree as i128 && acc.kfree <= n1;
    // deterministic witness selection: lexicographically smallest per class
    let mut witnesses = acc.witnesses;
    witnesses.sort_by(|a, b| (a.0 as u8, &a.1).cmp(&(b.0 as u8, &b.1)));
    let mut trimmed: Vec<(PointClass, Vec<i64>, String)> = Vec::new();
    for w in witnesses {
        if trimmed.iter().filter(|(cl, _, _)| *cl == w.0).count() < WITNESS_CAP {
            trimmed.push(w);
        }
    }
    Ok(SieveSplit {
        n1,
        n2: acc.n2,
        n3: acc.n3,
        excluded_small: acc.excluded,
        zero_points: acc.zeros,
        exact_count: acc.kfree,
        sandwich_ok,
        cutoffs: *cutoffs,
        witnesses: trimmed,
    })
}

/// Upper limit on the squarefree moduli enumerated by the Möbius estimator.
const MOBIUS_H_CAP: u64 = 10_000_000;

/// `sum_h mu(h) N(B; h)` over squarefree `h` supported on primes `<= xi1`
/// (all primes when `xi1` is `None`), truncated at `h^k <= max|F|` where the
/// counts vanish anyway. With `xi1 = None` this equals `count_kfree` exactly.
pub fn mobius_estimate(
    f: &MultiPoly,
    k: u32,
    bx: &LatticeBox,
    xi1: Option<f64>,
    budget: &Budget,
) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "Möbius estimator requires a nonzero polynomial".into(),
        ));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("Möbius estimator needs k >= 2".into()));
    }
    let bound = f.max_abs_on_box(bx)?;
    let h_max = bound.nth_root(k).to_u64().unwrap_or(u64::MAX);
    if h_max > MOBIUS_H_CAP {
        return Err(Error::BudgetExceeded {
            required: h_max as u128,
            budget: MOBIUS_H_CAP,
        });
    }
    let mu = mobius_up_to(h_max);
    let mut hs: Vec<(i64, i8)> = Vec::new();
    for h in 1..=h_max {
        let m = mu[h as usize];
        if m == 0 {
            continue;
        }
        if let Some(x1) = xi1 {
            if factor_u64(h).iter().any(|(p, _)| *p as f64 > x1) {
                continue;
            }
        }
        let hk = (h as i64).checked_pow(k);
        match hk {
            Some(v) => hs.push((v, m)),
            None => continue, // h^k exceeds i64, hence exceeds max|F|
        }
    }
    #[derive(Default)]
    struct Acc {
        sum: i64,
    }
    let acc = scan::scan_box(
        f,
        bx,
        budget,
        Acc::default,
        |acc, _pt, v| {
            if v.is_zero() {
                return;
            }
            match v {
                Value::Small(x) => {
                    for &(hk, m) in &hs {
                        if x % hk == 0 {
                            acc.sum += m as i64;
                        }
                    }
                }
                Value::Big(x) => {
                    for &(hk, m) in &hs {
                        if (x % BigInt::from(hk)).is_zero() {
                            acc.sum += m as i64;
                        }
                    }
                }
            }
        },
        |mut a, b| {
            a.sum += b.sum;
            a
        },
    )?;
    Ok(acc.sum)
}

/// `N_p*(B)`: box points whose reduction mod p lies on the codimension-2
/// variety `F = G = 0` with `G = dF/dx_1`. Computed by enumerating
/// `V_{F,G}(F_p)` and counting each residue class by exact interval
/// arithmetic; zeros of `F` are not excluded here.
pub fn count_np_star(f: &MultiPoly, p: u64, bx: &LatticeBox, budget: &Budget) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "N_p* requires a nonzero polynomial".into(),
        ));
    }
    let n = f.n_vars();
    if bx.n_vars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bx.n_vars(),
        });
    }
    budget.check_tuples((p as u128).pow(n as u32))?;
    let g = f.partial_derivative(1)?;
    let fp = ModPoly::from_poly(f, p);
    let gp = ModPoly::from_poly(&g, p);
    let total = parallel_count_roots(&[&fp, &gp], false, |pt| {
        let mut class = 1u64;
        for (&b, &r) in bx.bounds().iter().zip(pt) {
            class *= LatticeBox::residue_class_count(b, r, p);
        }
        class
    });
    Ok(total)
}

/// `N_p`-dagger: box points with `p^2 | F(x)`, `p` not dividing `G(x)`,
/// and `F(x) != 0` (zeros tallied out, matching the other counters).
pub fn count_np_dagger(f: &MultiPoly, p: u64, bx: &LatticeBox, budget: &Budget) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "N_p-dagger requires a nonzero polynomial".into(),
        ));
    }
    let g = f.partial_derivative(1)?;
    let p2 = BigInt::from(p) * BigInt::from(p);
    let p2_small = p2.to_i64();
    let gp = ModPoly::from_poly(&g, p);
    #[derive(Default)]
    struct Acc {
        count: u64,
    }
    let acc = scan::scan_box(
        f,
        bx,
        budget,
        Acc::default,
        |acc, pt, v| {
            if v.is_zero() {
                return;
            }
            let divisible = match (&v, p2_small) {
                (Value::Small(x), Some(m)) => x % m == 0,
                _ => (v.to_bigint() % &p2).is_zero(),
            };
            if !divisible {
                return;
            }
            let reduced: Vec<u64> = pt.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
            if gp.eval(&reduced) != 0 {
                acc.count += 1;
            }
        },
        |mut a, b| {
            a.count += b.count;
            a
        },
    )?;
    Ok(acc.count)
}

/// Large-prime-power count over one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LargePowerCount {
    pub count: u64,
    pub zero_points: u64,
}

/// `P(B, f)`: integers `1 <= n <= B` such that some prime `p > xi2` has
/// `p^e | f(n)`; the integer cofactor is unconstrained. Zeros of `f` are
/// excluded and tallied.
pub fn count_p_large_powers(
    f: &MultiPoly,
    b: i64,
    e: u32,
    xi2: f64,
    budget: &Budget,
) -> Result<LargePowerCount> {
    if f.n_vars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.n_vars(),
        });
    }
    if e == 0 {
        return Err(Error::InvalidParameter("exponent e must be >= 1".into()));
    }
    if b < 1 {
        return Err(Error::InvalidParameter("range bound B must be >= 1".into()));
    }
    budget.check_points(b as u128)?;
    let mut count = 0u64;
    let mut zeros = 0u64;
    for x in 1..=b {
        let v = f.evaluate_i64(&[x])?;
        if v.is_zero() {
            zeros += 1;
            continue;
        }
        let factors = arith_factor(&v)?;
        if factors
            .iter()
            .any(|(p, exp)| *exp >= e && p.to_f64().unwrap_or(f64::INFINITY) > xi2)
        {
            count += 1;
        }
    }
    Ok(LargePowerCount {
        count,
        zero_points: zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_kfree;
    use num_integer::Integer;

    fn poly(text: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(text, n).unwrap()
    }

    fn cutoffs(xi1: f64, xi2: f64) -> SieveCutoffs {
        SieveCutoffs {
            xi1,
            xi2,
            flavor: SieveFlavor::Integer,
            c: 1.0,
        }
    }

    #[test]
    fn default_cutoffs_match_formulas() {
        let c = SieveCutoffs::integer_defaults(10, 1, 2).unwrap();
        assert!((c.xi1 - 1.1512925464970228).abs() < 1e-12);
        assert!((c.xi2 - 10.0 * (10f64).ln().sqrt()).abs() < 1e-9);
    }

    #[test]
    fn classify_spec_examples() {
        let f = poly("x", 1);
        let cut = cutoffs(1.15, 15.2);
        let c = classify_point(&f, 2, &[8], &cut).unwrap();
        assert_eq!(c.class, PointClass::N2);
        assert_eq!(c.witness_prime, Some(BigUint::from(2u32)));
        assert_eq!(
            classify_point(&f, 2, &[7], &cut).unwrap().class,
            PointClass::N1Only
        );
        assert_eq!(
            classify_point(&f, 2, &[0], &cut).unwrap().class,
            PointClass::Zero
        );
    }

    #[test]
    fn decompose_spec_example_defaults() {
        let f = poly("x", 1);
        let bx = LatticeBox::uniform(1, 10).unwrap();
        let cut = SieveCutoffs::integer_defaults(10, 1, 2).unwrap();
        let split = sieve_decompose(&f, 2, &bx, &cut, &Budget::default()).unwrap();
        assert_eq!((split.n1, split.n2, split.n3), (20, 6, 0));
        assert_eq!(split.exact_count, 14);
        assert!(split.sandwich_ok);
        assert_eq!(split.zero_points, 1);
    }

    #[test]
    fn decompose_spec_example_forced_xi1() {
        let f = poly("x", 1);
        let bx = LatticeBox::uniform(1, 10).unwrap();
        let cut = cutoffs(2.0, 15.2);
        let split = sieve_decompose(&f, 2, &bx, &cut, &Budget::default()).unwrap();
        assert_eq!((split.n1, split.n2, split.n3), (16, 2, 0));
        assert_eq!(split.excluded_small, 4);
        assert!(split.sandwich_ok);
    }

    #[test]
    fn empty_box_rejected() {
        assert!(LatticeBox::uniform(1, 0).is_err());
    }

    #[test]
    fn classes_partition_nonzero_points() {
        let f = poly("x^2 + y + 2", 2);
        let bx = LatticeBox::uniform(2, 9).unwrap();
        let cut = cutoffs(2.5, 11.0);
        let split = sieve_decompose(&f, 2, &bx, &cut, &Budget::default()).unwrap();
        let total = bx.point_count() as u64;
        assert_eq!(
            split.n1 + split.excluded_small + split.zero_points,
            total
        );
    }

    #[test]
    fn mobius_spec_examples() {
        let b = Budget::default();
        let f = poly("x", 1);
        let bx = LatticeBox::uniform(1, 10).unwrap();
        assert_eq!(mobius_estimate(&f, 2, &bx, None, &b).unwrap(), 14);
        assert_eq!(mobius_estimate(&f, 2, &bx, Some(1.15), &b).unwrap(), 20);
        assert_eq!(mobius_estimate(&f, 3, &bx, None, &b).unwrap(), 18);
    }

    #[test]
    fn mobius_finite_cutoff_equals_n1() {
        let b = Budget::default();
        let f = poly("x^2 + 3", 1);
        let bx = LatticeBox::uniform(1, 40).unwrap();
        for xi1 in [2.0, 3.0, 5.0] {
            let est = mobius_estimate(&f, 2, &bx, Some(xi1), &b).unwrap();
            let split =
                sieve_decompose(&f, 2, &bx, &cutoffs(xi1, 1000.0), &b).unwrap();
            assert_eq!(est, split.n1 as i64, "xi1={xi1}");
        }
    }

    #[test]
    fn np_star_spec_examples() {
        let b = Budget::default();
        assert_eq!(
            count_np_star(
                &poly("x^2 + y^2", 2),
                3,
                &LatticeBox::uniform(2, 5).unwrap(),
                &b
            )
            .unwrap(),
            9
        );
        assert_eq!(
            count_np_star(&poly("x", 1), 7, &LatticeBox::uniform(1, 20).unwrap(), &b).unwrap(),
            0
        );
        assert_eq!(
            count_np_star(&poly("x*y", 2), 5, &LatticeBox::uniform(2, 5).unwrap(), &b).unwrap(),
            33
        );
    }

    #[test]
    fn np_dagger_spec_examples() {
        let b = Budget::default();
        assert_eq!(
            count_np_dagger(&poly("x^2", 1), 3, &LatticeBox::uniform(1, 9).unwrap(), &b).unwrap(),
            0
        );
        assert_eq!(
            count_np_dagger(&poly("x", 1), 2, &LatticeBox::uniform(1, 10).unwrap(), &b).unwrap(),
            4
        );
    }

    #[test]
    fn np_dagger_fiber_bound() {
        // for fixed tails m with F_m not 0 mod p and p not dividing disc,
        // at most d residues x mod p^2 satisfy p^2 | F_m(x), p not | F_m'(x)
        let f = poly("x^2*y + x + 1", 2);
        let d = f.degree();
        for p in [3u64, 5, 7] {
            for tail in -3i64..=3 {
                let fm = f.specialize_tail(&[BigInt::from(tail)]).unwrap();
                let fp = ModPoly::from_poly(&fm, p);
                if fp.is_zero() {
                    continue;
                }
                let dense = fp.dense_univariate();
                let gf = crate::modp::PolyGf::new(p, dense);
                let der = gf.derivative();
                let shared = crate::modp::PolyGf::gcd(&gf, &der);
                if shared.deg() != Some(0) || gf.deg() != Some(fm.degree() as usize) {
                    continue; // p divides the discriminant (or the leading coeff)
                }
                let fm_der = fm.partial_derivative(1).unwrap();
                let p2 = (p * p) as i64;
                let mut hits = 0u64;
                for x in 0..p2 {
                    let v = fm.evaluate_i64(&[x]).unwrap();
                    let dv = fm_der.evaluate_i64(&[x]).unwrap();
                    let div_p2 = v.mod_floor(&BigInt::from(p2)).is_zero();
                    let der_unit = !dv.mod_floor(&BigInt::from(p as i64)).is_zero();
                    if div_p2 && der_unit {
                        hits += 1;
                    }
                }
                assert!(hits <= d as u64, "p={p} tail={tail} hits={hits}");
            }
        }
    }

    #[test]
    fn large_powers_spec_examples() {
        let b = Budget::default();
        let r = count_p_large_powers(&poly("x^3", 1), 27, 2, 2.0, &b).unwrap();
        assert_eq!(r.count, 22);
        let r = count_p_large_powers(&poly("x", 1), 25, 2, 3.0, &b).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn sandwich_holds_for_sampled_configurations() {
        let b = Budget::default();
        let cases = [
            ("x^2 + 1", 1usize, 2u32, 30i64),
            ("x*y + 3", 2, 2, 12),
            ("x^3 - y", 2, 3, 10),
            ("x^2 + y^2 + z^2", 3, 2, 5),
        ];
        for (text, n, k, bb) in cases {
            let f = poly(text, n);
            let bx = LatticeBox::uniform(n, bb).unwrap();
            for cut in [
                SieveCutoffs::integer_defaults(bb, n, k).unwrap(),
                cutoffs(2.0, 7.0),
                cutoffs(3.5, 50.0),
            ] {
                let split = sieve_decompose(&f, k, &bx, &cut, &b).unwrap();
                let exact = count_kfree(&f, k, &bx, &b).unwrap().count;
                assert_eq!(split.exact_count, exact);
                assert!(split.sandwich_ok, "F={text} cutoffs={cut:?}");
            }
        }
    }
}
