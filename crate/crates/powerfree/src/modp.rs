//! Internal modular-arithmetic machinery: sparse polynomials with reduced
//! coefficients for residue scans, and dense univariate arithmetic over
//! GF(p) for the fast root-counting path.
//!
//! Moduli are capped by the enumeration budgets, so every product here fits
//! in `u64` (m <= 1e8 gives products < 1e16).

use crate::polynomial::MultiPoly;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// Sparse polynomial with coefficients reduced into `[0, m)`.
#[derive(Debug, Clone)]
pub(crate) struct ModPoly {
    pub n_vars: usize,
    pub m: u64,
    /// (exponent vector, coefficient); no zero coefficients.
    pub terms: Vec<(Vec<u32>, u64)>,
}

impl ModPoly {
    pub fn from_poly(f: &MultiPoly, m: u64) -> Self {
        assert!(m >= 1);
        let mb = num_bigint::BigInt::from(m);
        let mut terms = Vec::with_capacity(f.term_count());
        for (mono, c) in f.terms() {
            let r = c.mod_floor(&mb).to_u64().unwrap();
            if r != 0 {
                terms.push((mono.0.clone(), r));
            }
        }
        ModPoly {
            n_vars: f.n_vars(),
            m,
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        debug_assert_eq!(point.len(), self.n_vars);
        let m = self.m;
        let mut acc = 0u64;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t = mulmod(t, powmod(x % m, e as u64, m), m);
                }
            }
            acc = (acc + t) % m;
        }
        acc
    }

    /// Fix the first variable to `value`, yielding a polynomial in the
    /// remaining `n_vars - 1` variables.
    pub fn specialize_first(&self, value: u64) -> ModPoly {
        debug_assert!(self.n_vars >= 2);
        let m = self.m;
        let max_e = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0);
        let mut pows = Vec::with_capacity(max_e as usize + 1);
        let mut acc = 1u64 % m;
        for _ in 0..=max_e {
            pows.push(acc);
            acc = mulmod(acc, value % m, m);
        }
        let mut out: Vec<(Vec<u32>, u64)> = Vec::with_capacity(self.terms.len());
        for (exps, c) in &self.terms {
            let coeff = mulmod(*c, pows[exps[0] as usize], m);
            if coeff == 0 {
                continue;
            }
            let rest = exps[1..].to_vec();
            match out.iter_mut().find(|(e, _)| *e == rest) {
                Some((_, acc)) => {
                    *acc = (*acc + coeff) % m;
                }
                None => out.push((rest, coeff)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        ModPoly {
            n_vars: self.n_vars - 1,
            m,
            terms: out,
        }
    }

    /// Dense coefficient vector (ascending degree) for univariate polynomials.
    pub fn dense_univariate(&self) -> Vec<u64> {
        debug_assert_eq!(self.n_vars, 1);
        let d = self.terms.iter().map(|(e, _)| e[0]).max().unwrap_or(0);
        let mut c = vec![0u64; d as usize + 1];
        for (e, v) in &self.terms {
            c[e[0] as usize] = (c[e[0] as usize] + v) % self.m;
        }
        c
    }

}

/// Streams `f(0), f(1), f(2), ...` mod p for a dense univariate `f` using a
/// forward-difference table: one step costs `deg f` modular additions and no
/// divisions.
pub(crate) struct RangeEval {
    p: u64,
    diffs: Vec<u64>,
}

impl RangeEval {
    pub fn new(dense: &[u64], p: u64) -> Self {
        let d = dense.len().saturating_sub(1);
        let mut vals: Vec<u64> = (0..=d as u64).map(|s| horner(dense, s % p, p)).collect();
        for level in 1..=d {
            for i in (level..=d).rev() {
                vals[i] = (vals[i] + p - vals[i - 1]) % p;
            }
        }
        RangeEval { p, diffs: vals }
    }

    /// Current value, then advance to the next argument.
    #[inline]
    pub fn next_value(&mut self) -> u64 {
        let v = self.diffs[0];
        for j in 0..self.diffs.len() - 1 {
            let s = self.diffs[j] + self.diffs[j + 1];
            self.diffs[j] = if s >= self.p { s - self.p } else { s };
        }
        v
    }
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(a < m && b < m || m == 1);
    if m <= u32::MAX as u64 + 1 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

pub(crate) fn powmod(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn horner(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (mulmod(acc, x, m) + c) % m;
    }
    acc
}

/// Summed weights over all common roots, enumerated in parallel over the
/// first coordinate's residues; the associative sum makes the result
/// independent of the split.
pub(crate) fn parallel_count_roots<W>(polys: &[&ModPoly], units_only: bool, weight: W) -> u64
where
    W: Fn(&[u64]) -> u64 + Sync,
{
    use rayon::prelude::*;
    let n = polys[0].n_vars;
    let m = polys[0].m;
    if n == 1 {
        let mut acc = 0u64;
        scan_common_roots(polys, units_only, &mut |pt| acc += weight(pt));
        return acc;
    }
    let start = if units_only { 1u64 } else { 0 };
    (start..m)
        .into_par_iter()
        .map(|c| {
            if units_only && c.gcd(&m) != 1 {
                return 0;
            }
            let specialized: Vec<ModPoly> =
                polys.iter().map(|f| f.specialize_first(c)).collect();
            let mut point = vec![0u64; n];
            point[0] = c;
            let mut acc = 0u64;
            scan_rec(&specialized, m, units_only, &mut point, 1, &mut |pt| {
                acc += weight(pt)
            });
            acc
        })
        .sum()
}

/// Visit every tuple in `[0,m)^n` (or units-only coordinates) at which all
/// the given polynomials vanish mod m. Tuples are visited in odometer order.
pub(crate) fn scan_common_roots<F>(polys: &[&ModPoly], units_only: bool, visitor: &mut F)
where
    F: FnMut(&[u64]),
{
    assert!(!polys.is_empty());
    let n = polys[0].n_vars;
    let m = polys[0].m;
    debug_assert!(polys.iter().all(|f| f.n_vars == n && f.m == m));
    let mut point = vec![0u64; n];
    let locals: Vec<ModPoly> = polys.iter().map(|&f| f.clone()).collect();
    scan_rec(&locals, m, units_only, &mut point, 0, visitor);
}

fn scan_rec<F>(
    polys: &[ModPoly],
    m: u64,
    units_only: bool,
    point: &mut Vec<u64>,
    depth: usize,
    visitor: &mut F,
) where
    F: FnMut(&[u64]),
{
    let n = polys[0].n_vars;
    if n == 1 {
        let dense: Vec<Vec<u64>> = polys.iter().map(|f| f.dense_univariate()).collect();
        let start = if units_only { 1 } else { 0 };
        for s in start..m {
            if units_only && s.gcd(&m) != 1 {
                continue;
            }
            if dense.iter().all(|c| horner(c, s, m) == 0) {
                point[depth] = s;
                visitor(point);
            }
        }
        return;
    }
    let start = if units_only { 1 } else { 0 };
    for c in start..m {
        if units_only && c.gcd(&m) != 1 {
            continue;
        }
        point[depth] = c;
        let specialized: Vec<ModPoly> = polys.iter().map(|f| f.specialize_first(c)).collect();
        scan_rec(&specialized, m, units_only, point, depth + 1, visitor);
    }
}

/// Dense univariate polynomial over GF(p), trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PolyGf {
    pub p: u64,
    pub c: Vec<u64>, // ascending degree; empty means zero
}

impl PolyGf {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for v in &mut c {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyGf { p, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn monic(&self) -> PolyGf {
        if self.is_zero() {
            return self.clone();
        }
        let lead = *self.c.last().unwrap();
        if lead == 1 {
            return self.clone();
        }
        let inv = powmod(lead, self.p - 2, self.p);
        PolyGf::new(
            self.p,
            self.c.iter().map(|&v| mulmod(v, inv, self.p)).collect(),
        )
    }

    pub fn rem(&self, modulus: &PolyGf) -> PolyGf {
        let p = self.p;
        let md = modulus.deg().expect("division by zero polynomial");
        if md == 0 {
            return PolyGf::new(p, vec![]);
        }
        let lead_inv = powmod(*modulus.c.last().unwrap(), p - 2, p);
        let mut r = self.c.clone();
        while r.len() > md {
            let k = r.len() - 1 - md;
            let factor = mulmod(*r.last().unwrap(), lead_inv, p);
            if factor != 0 {
                for (i, &mc) in modulus.c.iter().enumerate() {
                    let idx = k + i;
                    let sub = mulmod(factor, mc, p);
                    r[idx] = (r[idx] + p - sub) % p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        PolyGf::new(p, r)
    }

    pub fn gcd(a: &PolyGf, b: &PolyGf) -> PolyGf {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> PolyGf {
        let p = self.p;
        let c: Vec<u64> = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| mulmod(v, (i as u64) % p, p))
            .collect();
        PolyGf::new(p, c)
    }

    pub fn mul(&self, other: &PolyGf) -> PolyGf {
        if self.is_zero() || other.is_zero() {
            return PolyGf::new(self.p, vec![]);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        PolyGf::new(p, out)
    }

    /// `x^e mod self` by binary exponentiation; requires `deg(self) >= 1`.
    pub fn x_pow_mod(&self, mut e: u64) -> PolyGf {
        let p = self.p;
        let mut acc = PolyGf::new(p, vec![1]);
        let mut base = PolyGf::new(p, vec![0, 1]).rem(self);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(self);
            }
            base = base.mul(&base).rem(self);
            e >>= 1;
        }
        acc
    }

    pub fn sub(&self, other: &PolyGf) -> PolyGf {
        let p = self.p;
        let len = self.c.len().max(other.c.len());
        let mut out = vec![0u64; len];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = other.c.get(i).copied().unwrap_or(0);
            *slot = (a + p - b) % p;
        }
        PolyGf::new(p, out)
    }

    pub fn eval(&self, x: u64) -> u64 {
        horner(&self.c, x % self.p, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::MultiPoly;

    #[test]
    fn modpoly_eval_and_specialize() {
        let f = MultiPoly::parse("x^2 + 3*x*y + y^2", 2).unwrap();
        let g = ModPoly::from_poly(&f, 7);
        assert_eq!(g.eval(&[2, 3]), (4 + 18 + 9) % 7);
        let h = g.specialize_first(2);
        assert_eq!(h.n_vars, 1);
        for y in 0..7u64 {
            assert_eq!(h.eval(&[y]), g.eval(&[2, y]));
        }
    }

    #[test]
    fn scan_finds_all_roots() {
        let f = MultiPoly::parse("x*y", 2).unwrap();
        let g = ModPoly::from_poly(&f, 2);
        let mut roots = Vec::new();
        scan_common_roots(&[&g], false, &mut |pt| roots.push(pt.to_vec()));
        assert_eq!(roots, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn gf_gcd_counts_distinct_roots() {
        // f = x^2 + 1 over GF(5): roots 2 and 3
        let p = 5u64;
        let f = PolyGf::new(p, vec![1, 0, 1]);
        let xp = f.x_pow_mod(p);
        let x = PolyGf::new(p, vec![0, 1]).rem(&f);
        let h = PolyGf::gcd(&f, &xp.sub(&x));
        assert_eq!(h.deg(), Some(2));
        // f = x^2 + 1 over GF(3): no roots
        let f3 = PolyGf::new(3, vec![1, 0, 1]);
        let xp3 = f3.x_pow_mod(3);
        let x3 = PolyGf::new(3, vec![0, 1]).rem(&f3);
        let h3 = PolyGf::gcd(&f3, &xp3.sub(&x3));
        assert_eq!(h3.deg(), Some(0));
    }
}
