//! Sparse exact-integer multivariate polynomials and integer boxes.
//!
//! Terms are stored in a map from exponent vector to nonzero `BigInt`
//! coefficient, ordered graded-lexicographically so printing and hashing are
//! deterministic. All operations are pure; values are immutable after
//! construction and safe to share across threads.

mod parse;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with arbitrary-precision integer
/// coefficients. The zero polynomial has an empty term map and degree 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    n_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
    degree: u32,
}

impl MultiPoly {
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars >= 1, "polynomials need at least one variable");
        MultiPoly {
            n_vars,
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    pub fn constant(n_vars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; n_vars]), c);
        }
        p
    }

    /// The variable `x_i` with 1-based index `i`.
    pub fn variable(n_vars: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n_vars {
            return Err(Error::IndexOutOfRange { index: i, n_vars });
        }
        let mut exps = vec![0u32; n_vars];
        exps[i - 1] = 1;
        let mut p = Self::zero(n_vars);
        p.terms.insert(Monomial(exps), BigInt::one());
        p.degree = 1;
        Ok(p)
    }

    /// Build from raw (exponents, coefficient) pairs; zero coefficients and
    /// repeated monomials are merged away.
    pub fn from_terms<I>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Self::zero(n_vars);
        for (exps, coeff) in terms {
            if exps.len() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: exps.len(),
                });
            }
            p.add_term(Monomial(exps), coeff);
        }
        p.recompute_degree();
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn recompute_degree(&mut self) {
        self.degree = self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0);
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Total degree; 0 for the zero polynomial by convention.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Parse an expression in variables `x1..xn` (aliases `x,y,z` for
    /// `n <= 3`); see the crate README for the grammar.
    pub fn parse(text: &str, n_vars: usize) -> Result<Self> {
        parse::parse(text, n_vars)
    }

    /// Exact value at an integer point.
    pub fn evaluate(&self, point: &[BigInt]) -> Result<BigInt> {
        if point.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: point.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.pow(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_i64(&self, point: &[i64]) -> Result<BigInt> {
        let big: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        self.evaluate(&big)
    }

    /// Formal partial derivative with respect to the 1-based variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.n_vars {
            return Err(Error::IndexOutOfRange {
                index: i,
                n_vars: self.n_vars,
            });
        }
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[i - 1];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i - 1] = e - 1;
            out.add_term(Monomial(exps), c * BigInt::from(e));
        }
        out.recompute_degree();
        Ok(out)
    }

    /// Substitute `x_2, ..., x_n` by the integers in `tail`, producing a
    /// univariate polynomial in `x_1`.
    pub fn specialize_tail(&self, tail: &[BigInt]) -> Result<Self> {
        if self.n_vars < 2 {
            return Err(Error::InvalidParameter(
                "specialize requires at least two variables".into(),
            ));
        }
        if tail.len() != self.n_vars - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars - 1,
                got: tail.len(),
            });
        }
        let mut out = Self::zero(1);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in tail.iter().zip(&m.0[1..]) {
                if e > 0 {
                    t *= x.pow(e);
                }
            }
            out.add_term(Monomial(vec![m.0[0]]), t);
        }
        out.recompute_degree();
        Ok(out)
    }

    /// Upper bound for `max |F(x)|` over the box: sum of
    /// `|a_f| * prod B_i^{f_i}`. Exact and monotone in the bounds.
    pub fn max_abs_on_box(&self, bounds: &LatticeBox) -> Result<BigInt> {
        if bounds.n_vars() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: bounds.n_vars(),
            });
        }
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.abs();
            for (&b, &e) in bounds.bounds().iter().zip(&m.0) {
                if e > 0 {
                    t *= BigInt::from(b).pow(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute each variable by a polynomial over `n_vars_out` variables.
    pub fn substitute(&self, n_vars_out: usize, images: &[MultiPoly]) -> Result<Self> {
        if images.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: images.len(),
            });
        }
        for img in images {
            if img.n_vars != n_vars_out {
                return Err(Error::DimensionMismatch {
                    expected: n_vars_out,
                    got: img.n_vars,
                });
            }
        }
        let mut acc = Self::zero(n_vars_out);
        for (m, c) in &self.terms {
            let mut t = Self::constant(n_vars_out, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.n_vars, BigInt::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Positive gcd of all coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Divide every coefficient by `d`, asserting exactness.
    pub fn div_exact(&self, d: &BigInt) -> Self {
        assert!(!d.is_zero());
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            assert!(r.is_zero(), "non-exact coefficient division");
            out.terms.insert(m.clone(), q);
        }
        out.recompute_degree();
        out
    }

    /// If the primitive part of `self` is `±G^k` for a polynomial `G`,
    /// return such a `G`; used to flag degenerate perfect-power inputs.
    pub fn kth_root_of_primitive_part(&self, k: u32) -> Option<MultiPoly> {
        if k < 2 || self.is_zero() {
            return None;
        }
        let content = self.content();
        let mut prim = self.div_exact(&content);
        // Leading coefficient of G^k is a k-th power; normalize sign first.
        let (lead_m, lead_c) = prim.terms.iter().next_back()?;
        let lead_m = lead_m.clone();
        let mut negated = false;
        if lead_c.is_negative() {
            if k % 2 == 0 {
                return None;
            }
            prim = -&prim;
            negated = true;
        }
        if lead_m.0.iter().any(|&e| e % k != 0) {
            return None;
        }
        let lead_c = prim.terms.get(&lead_m).unwrap().clone();
        let root_c = lead_c.nth_root(k);
        if root_c.pow(k) != lead_c {
            return None;
        }
        let root_m = Monomial(lead_m.0.iter().map(|&e| e / k).collect());
        let mut root = Self::zero(self.n_vars);
        root.terms.insert(root_m.clone(), root_c.clone());
        root.recompute_degree();
        // Greedy descent on the graded-lex leading term of the residual:
        // each next term t of G satisfies k * lt(G)^{k-1} * t = lt(residual).
        let lead_pow_coeff = BigInt::from(k) * root_c.pow(k - 1).clone();
        let lead_pow_exps: Vec<u32> = root_m.0.iter().map(|&e| e * (k - 1)).collect();
        let max_iters = 4096usize;
        for _ in 0..max_iters {
            let residual = &prim - &root.pow(k);
            let Some((rm, rc)) = residual.terms.iter().next_back() else {
                return Some(if negated { -&root } else { root });
            };
            let mut exps = Vec::with_capacity(self.n_vars);
            for (&re, &le) in rm.0.iter().zip(&lead_pow_exps) {
                if re < le {
                    return None;
                }
                exps.push(re - le);
            }
            let (q, r) = rc.div_rem(&lead_pow_coeff);
            if !r.is_zero() || q.is_zero() {
                return None;
            }
            let cand = Monomial(exps);
            if cand >= root_m {
                return None; // not descending: cannot be a k-th power
            }
            root.add_term(cand, q);
            root.recompute_degree();
        }
        None
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out.recompute_degree();
        out
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out.recompute_degree();
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out.degree = self.degree;
        out
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = MultiPoly::zero(self.n_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(&a, &b)| a + b).collect();
                out.add_term(Monomial(exps), ca * cb);
            }
        }
        out.recompute_degree();
        out
    }
}

/// Canonical form: descending graded-lex, explicit `*` and `^`,
/// variables printed as `x1..xn`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut wrote = false;
            if !mag.is_one() || m.total_degree() == 0 {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

/// Symmetric integer box `|x_i| <= B_i` with 64-bit bounds, every `B_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct LatticeBox {
    bounds: Vec<i64>,
}

impl LatticeBox {
    pub fn new(bounds: Vec<i64>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidParameter("box needs at least one bound".into()));
        }
        if let Some(&b) = bounds.iter().find(|&&b| b < 1) {
            return Err(Error::InvalidParameter(format!(
                "box bound {b} is below 1"
            )));
        }
        Ok(LatticeBox { bounds })
    }

    pub fn uniform(n_vars: usize, b: i64) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidParameter("box needs at least one bound".into()));
        }
        Self::new(vec![b; n_vars])
    }

    pub fn n_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    /// Number of lattice points, `prod (2 B_i + 1)`.
    pub fn point_count(&self) -> u128 {
        self.bounds
            .iter()
            .map(|&b| 2 * b as u128 + 1)
            .product()
    }

    /// Legendre-style count of `x ≡ r (mod m)` with `|x| <= B`, for a
    /// residue representative `0 <= r < m`.
    pub fn residue_class_count(b: i64, r: u64, m: u64) -> u64 {
        debug_assert!(r < m);
        let b = b as i128;
        let r = r as i128;
        let m = m as i128;
        (((b - r).div_euclid(m)) + ((b + r).div_euclid(m)) + 1).max(0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn poly(text: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(text, n).unwrap()
    }

    #[test]
    fn parse_examples_from_grammar() {
        let p = poly("x^2 + y^3", 2);
        assert_eq!(p.coefficient(&[2, 0]), BigInt::from(1));
        assert_eq!(p.coefficient(&[0, 3]), BigInt::from(1));
        assert_eq!(p.term_count(), 2);
        assert_eq!(p.degree(), 3);

        let z = poly("0", 1);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);

        let q = poly("2*x1*x2 - x1", 2);
        assert_eq!(q.coefficient(&[1, 1]), BigInt::from(2));
        assert_eq!(q.coefficient(&[1, 0]), BigInt::from(-1));
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn evaluate_examples() {
        let p = poly("x^2 + y^3", 2);
        assert_eq!(p.evaluate_i64(&[2, 3]).unwrap(), BigInt::from(31));
        let q = poly("2*x^2 + 2*x", 1);
        assert_eq!(q.evaluate_i64(&[3]).unwrap(), BigInt::from(24));
        // all-zero point gives the constant term
        let r = poly("x*y + 7", 2);
        assert_eq!(r.evaluate_i64(&[0, 0]).unwrap(), BigInt::from(7));
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let p = poly("x", 1);
        assert!(matches!(
            p.evaluate_i64(&[1, 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        let p = poly("x^2*y", 2);
        assert_eq!(p.partial_derivative(1).unwrap(), poly("2*x*y", 2));
        let c = poly("5", 2);
        assert!(c.partial_derivative(1).unwrap().is_zero());
        let s = poly("x^2 + y^2", 2);
        assert_eq!(s.partial_derivative(1).unwrap(), poly("2*x", 2));
        assert!(matches!(
            s.partial_derivative(3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn specialize_examples() {
        let p = poly("x^2 + y^3", 2);
        let s = p.specialize_tail(&[BigInt::from(2)]).unwrap();
        assert_eq!(s, poly("x^2 + 8", 1));

        let q = poly("x*y", 2);
        assert!(q.specialize_tail(&[BigInt::from(0)]).unwrap().is_zero());

        let r = poly("x^2 + x*y + 1", 2);
        assert_eq!(
            r.specialize_tail(&[BigInt::from(3)]).unwrap(),
            poly("x^2 + 3*x + 1", 1)
        );
    }

    #[test]
    fn max_abs_examples() {
        let p = poly("x", 1);
        assert_eq!(
            p.max_abs_on_box(&LatticeBox::uniform(1, 10).unwrap()).unwrap(),
            BigInt::from(10)
        );
        let q = poly("x^2 + y^2", 2);
        assert_eq!(
            q.max_abs_on_box(&LatticeBox::new(vec![3, 4]).unwrap()).unwrap(),
            BigInt::from(25)
        );
        let r = poly("2*x^2 - x", 1);
        assert_eq!(
            r.max_abs_on_box(&LatticeBox::uniform(1, 5).unwrap()).unwrap(),
            BigInt::from(55)
        );
    }

    #[test]
    fn display_roundtrip_canonical() {
        let p = poly("2*x1*x2 - x1", 2);
        let s = p.to_string();
        assert_eq!(s, "2*x1*x2 - x1");
        assert_eq!(MultiPoly::parse(&s, 2).unwrap(), p);
        assert_eq!(poly("0", 3).to_string(), "0");
        assert_eq!(poly("-x^2 + 1", 1).to_string(), "-x1^2 + 1");
    }

    #[test]
    fn box_construction_and_counting() {
        assert!(LatticeBox::uniform(2, 0).is_err());
        let b = LatticeBox::uniform(2, 3).unwrap();
        assert_eq!(b.point_count(), 49);
        // residues of 3 mod 5 in [-10, 10]: -7, -2, 3, 8
        assert_eq!(LatticeBox::residue_class_count(10, 3, 5), 4);
        assert_eq!(LatticeBox::residue_class_count(10, 0, 5), 5);
    }

    #[test]
    fn kth_root_detection() {
        let p = poly("x^2", 1);
        assert_eq!(p.kth_root_of_primitive_part(2).unwrap(), poly("x", 1));
        // content is stripped: 2x^2 + 2x is not a square, 4x^2 is
        assert!(poly("2*x^2 + 2*x", 1).kth_root_of_primitive_part(2).is_none());
        assert_eq!(
            poly("4*x^2*y^2", 2).kth_root_of_primitive_part(2).unwrap(),
            poly("x*y", 2)
        );
        let sq = poly("x^2 + 2*x*y + y^2", 2);
        assert_eq!(sq.kth_root_of_primitive_part(2).unwrap(), poly("x + y", 2));
        assert!(poly("x^2 + 1", 1).kth_root_of_primitive_part(2).is_none());
        let cube = poly("x + 1", 1).pow(3);
        assert_eq!(cube.kth_root_of_primitive_part(3).unwrap(), poly("x + 1", 1));
        assert!(poly("-x^2", 1).kth_root_of_primitive_part(2).is_none());
        assert_eq!(
            poly("-x^3", 1).kth_root_of_primitive_part(3).unwrap(),
            poly("-x", 1)
        );
    }

    #[test]
    fn substitution_and_pow() {
        // F(x) = x^2 + 1 composed with x -> 2y + 1
        let f = poly("x^2 + 1", 1);
        let img = poly("2*x + 1", 1);
        let g = f.substitute(1, &[img]).unwrap();
        assert_eq!(g, poly("4*x^2 + 4*x + 2", 1));
        assert_eq!(poly("x + y", 2).pow(2), poly("x^2 + 2*x*y + y^2", 2));
    }
}
