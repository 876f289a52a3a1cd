//! Shared lattice-point enumeration.
//!
//! Boxes partition on the leading coordinate; workers hold no shared mutable
//! state and partial accumulators merge associatively, so results do not
//! depend on the split or the thread count. Values are exact: an `i64`
//! fast path applies whenever the box-wide bound `max_abs_on_box` fits
//! comfortably, otherwise evaluation falls back to big integers.

use crate::arith::primes_up_to;
use crate::error::Result;
use crate::polynomial::{LatticeBox, MultiPoly};
use crate::Budget;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

/// Exact value of `F` at the visited point.
#[derive(Debug)]
pub(crate) enum Value<'a> {
    Small(i64),
    Big(&'a BigInt),
}

impl Value<'_> {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Small(v) => *v == 0,
            Value::Big(v) => v.is_zero(),
        }
    }

    pub fn abs_u64(&self) -> Option<u64> {
        match self {
            Value::Small(v) => Some(v.unsigned_abs()),
            Value::Big(v) => v.abs().to_u64(),
        }
    }

    pub fn to_bigint(&self) -> BigInt {
        match self {
            Value::Small(v) => BigInt::from(*v),
            Value::Big(v) => (*v).clone(),
        }
    }
}

const I64_SAFE_BOUND: i64 = i64::MAX / 4;

/// Sparse polynomial with `i64` coefficients; only constructed when every
/// intermediate stays below `I64_SAFE_BOUND`.
#[derive(Debug, Clone)]
struct IntPoly {
    n_vars: usize,
    terms: Vec<(Vec<u32>, i64)>,
}

impl IntPoly {
    fn try_from_poly(f: &MultiPoly) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(f.term_count());
        for (m, c) in f.terms() {
            terms.push((m.0.clone(), c.to_i64()?));
        }
        Some(IntPoly {
            n_vars: f.n_vars(),
            terms,
        })
    }

    fn specialize_first(&self, v: i64) -> IntPoly {
        debug_assert!(self.n_vars >= 2);
        let max_e = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0);
        let mut pows = Vec::with_capacity(max_e as usize + 1);
        let mut acc = 1i64;
        for _ in 0..=max_e {
            pows.push(acc);
            acc = acc.saturating_mul(v);
        }
        let mut out: Vec<(Vec<u32>, i64)> = Vec::with_capacity(self.terms.len());
        for (exps, c) in &self.terms {
            let coeff = c * pows[exps[0] as usize];
            let rest = &exps[1..];
            match out.iter_mut().find(|(e, _)| e == rest) {
                Some((_, acc)) => *acc += coeff,
                None => out.push((rest.to_vec(), coeff)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        IntPoly {
            n_vars: self.n_vars - 1,
            terms: out,
        }
    }

    fn dense_univariate(&self) -> Vec<i64> {
        debug_assert_eq!(self.n_vars, 1);
        let d = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0);
        let mut c = vec![0i64; d as usize + 1];
        for (e, v) in &self.terms {
            c[e[0] as usize] += v;
        }
        c
    }

    fn eval(&self, point: &[i64]) -> i64 {
        let mut acc = 0i64;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }
}

fn horner_i64(coeffs: &[i64], x: i64) -> i64 {
    let mut acc = 0i64;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Scan every lattice point of the box, calling `per_point` with the exact
/// value of `F`; partial accumulators are produced per leading-coordinate
/// value and merged with `reduce`.
pub(crate) fn scan_box<A, M, P, R>(
    f: &MultiPoly,
    bx: &LatticeBox,
    budget: &Budget,
    make: M,
    per_point: P,
    reduce: R,
) -> Result<A>
where
    A: Send,
    M: Fn() -> A + Sync,
    P: Fn(&mut A, &[i64], Value<'_>) + Sync,
    R: Fn(A, A) -> A + Sync,
{
    budget.check_points(bx.point_count())?;
    let bound = f.max_abs_on_box(bx)?;
    let n = f.n_vars();
    let b1 = bx.bounds()[0];
    let leading: Vec<i64> = (-b1..=b1).collect();
    let small = bound <= BigInt::from(I64_SAFE_BOUND);
    if small {
        let base = IntPoly::try_from_poly(f).expect("bounded polynomial fits i64");
        let dense1 = if n == 1 { Some(base.dense_univariate()) } else { None };
        let out = leading
            .par_iter()
            .map(|&x1| {
                let mut acc = make();
                let mut point = vec![0i64; n];
                point[0] = x1;
                if let Some(dense) = &dense1 {
                    per_point(&mut acc, &point, Value::Small(horner_i64(dense, x1)));
                } else {
                    let spec = base.specialize_first(x1);
                    scan_rec_i64(&spec, bx.bounds(), &mut point, 1, &mut acc, &per_point);
                }
                acc
            })
            .reduce(&make, &reduce);
        Ok(out)
    } else {
        let out = leading
            .par_iter()
            .map(|&x1| {
                let mut acc = make();
                let mut point = vec![0i64; n];
                point[0] = x1;
                scan_rec_big(f, bx.bounds(), &mut point, 1, &mut acc, &per_point);
                acc
            })
            .reduce(&make, &reduce);
        Ok(out)
    }
}

fn scan_rec_i64<A, P>(
    poly: &IntPoly,
    bounds: &[i64],
    point: &mut Vec<i64>,
    depth: usize,
    acc: &mut A,
    per_point: &P,
) where
    P: Fn(&mut A, &[i64], Value<'_>),
{
    if poly.n_vars == 1 {
        let dense = poly.dense_univariate();
        let b = bounds[depth];
        for x in -b..=b {
            point[depth] = x;
            per_point(acc, point, Value::Small(horner_i64(&dense, x)));
        }
        return;
    }
    let b = bounds[depth];
    for v in -b..=b {
        point[depth] = v;
        let inner = poly.specialize_first(v);
        scan_rec_i64(&inner, bounds, point, depth + 1, acc, per_point);
    }
}

fn scan_rec_big<A, P>(
    f: &MultiPoly,
    bounds: &[i64],
    point: &mut Vec<i64>,
    depth: usize,
    acc: &mut A,
    per_point: &P,
) where
    P: Fn(&mut A, &[i64], Value<'_>),
{
    if depth == bounds.len() {
        let val = f.evaluate_i64(point).expect("dimension checked");
        per_point(acc, point, Value::Big(&val));
        return;
    }
    let b = bounds[depth];
    for v in -b..=b {
        point[depth] = v;
        scan_rec_big(f, bounds, point, depth + 1, acc, per_point);
    }
}

/// Scan tuples of primes `<= b` (optionally signed), calling `per_point`
/// with the exact value of `F`.
pub(crate) fn scan_prime_tuples<A, M, P, R>(
    f: &MultiPoly,
    b: i64,
    include_negatives: bool,
    budget: &Budget,
    make: M,
    per_point: P,
    reduce: R,
) -> Result<A>
where
    A: Send,
    M: Fn() -> A + Sync,
    P: Fn(&mut A, &[i64], Value<'_>) + Sync,
    R: Fn(A, A) -> A + Sync,
{
    let n = f.n_vars();
    let primes = primes_up_to(b.max(0) as u64);
    let mut coords: Vec<i64> = primes.iter().map(|&p| p as i64).collect();
    if include_negatives {
        let negs: Vec<i64> = coords.iter().map(|&p| -p).collect();
        coords.extend(negs);
        coords.sort_unstable();
    }
    budget.check_points((coords.len() as u128).pow(n as u32))?;
    let bx = LatticeBox::uniform(n, b.max(1))?;
    let bound = f.max_abs_on_box(&bx)?;
    let small = bound <= BigInt::from(I64_SAFE_BOUND);
    let int_poly = if small { IntPoly::try_from_poly(f) } else { None };
    let out = coords
        .par_iter()
        .map(|&p1| {
            let mut acc = make();
            let mut point = vec![0i64; n];
            point[0] = p1;
            prime_rec(
                f,
                int_poly.as_ref(),
                &coords,
                &mut point,
                1,
                &mut acc,
                &per_point,
            );
            acc
        })
        .reduce(&make, &reduce);
    Ok(out)
}

fn prime_rec<A, P>(
    f: &MultiPoly,
    int_poly: Option<&IntPoly>,
    coords: &[i64],
    point: &mut Vec<i64>,
    depth: usize,
    acc: &mut A,
    per_point: &P,
) where
    P: Fn(&mut A, &[i64], Value<'_>),
{
    if depth == point.len() {
        match int_poly {
            Some(ip) => per_point(acc, point, Value::Small(ip.eval(point))),
            None => {
                let val = f.evaluate_i64(point).expect("dimension checked");
                per_point(acc, point, Value::Big(&val));
            }
        }
        return;
    }
    for &p in coords {
        point[depth] = p;
        prime_rec(f, int_poly, coords, point, depth + 1, acc, per_point);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_visits_every_point_once() {
        let f = MultiPoly::parse("x + 2*y", 2).unwrap();
        let bx = LatticeBox::new(vec![2, 1]).unwrap();
        let visited = scan_box(
            &f,
            &bx,
            &Budget::default(),
            Vec::new,
            |acc: &mut Vec<(Vec<i64>, i64)>, pt, v| {
                let val = match v {
                    Value::Small(x) => x,
                    Value::Big(_) => unreachable!(),
                };
                acc.push((pt.to_vec(), val));
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )
        .unwrap();
        assert_eq!(visited.len(), 15);
        for (pt, v) in &visited {
            assert_eq!(*v, pt[0] + 2 * pt[1]);
        }
    }

    #[test]
    fn big_path_matches_small_path() {
        // huge coefficient forces the BigInt path; compare against direct eval
        let f = MultiPoly::parse("1000000000000000000000*x*y + x", 2).unwrap();
        let bx = LatticeBox::uniform(2, 2).unwrap();
        let count = scan_box(
            &f,
            &bx,
            &Budget::default(),
            || 0u64,
            |acc, pt, v| {
                let direct = f.evaluate_i64(pt).unwrap();
                assert_eq!(v.to_bigint(), direct);
                *acc += 1;
            },
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(count, 25);
    }

    #[test]
    fn prime_tuples_enumerated() {
        let f = MultiPoly::parse("x*y", 2).unwrap();
        let count = scan_prime_tuples(
            &f,
            5,
            false,
            &Budget::default(),
            || 0u64,
            |acc, _, _| *acc += 1,
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(count, 9); // {2,3,5}^2
        let signed = scan_prime_tuples(
            &f,
            5,
            true,
            &Budget::default(),
            || 0u64,
            |acc, _, _| *acc += 1,
            |a, b| a + b,
        )
        .unwrap();
        assert_eq!(signed, 36);
    }
}
