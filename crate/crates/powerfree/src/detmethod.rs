//! Computable skeleton of the affine determinant method: the Newton
//! polyhedron maximum `T` and its argmax vertex, the exponent set, the
//! parameter `W`, monomial matrices with ranks over `F_p`, and the dyadic
//! counts `M(f; B)` and `R(F; B, H)`.
//!
//! `T` and the exponent-set membership are decided in exact integer
//! arithmetic (`prod B_i^{e_i}` compared as big integers), so boundary
//! vectors are classified exactly; only the final `W` and `log` views are
//! floating point.

use crate::error::{Error, Result};
use crate::polynomial::{LatticeBox, MultiPoly};
use crate::Budget;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Exponent-set size guard.
const EXPONENT_SET_CAP: usize = 1 << 20;

/// Determinant-method parameters for one polynomial and box.
#[derive(Debug, Clone, Serialize)]
pub struct DetParams {
    /// Exponent support of `F` (the Newton polyhedron is its lower-set
    /// hull; maximization only ever needs these vectors).
    pub support: Vec<Vec<u32>>,
    /// `T = max over support of B^f`, exact.
    pub t: String,
    pub log_t: f64,
    /// Graded-lex largest maximizing exponent vector.
    pub m_vertex: Vec<u32>,
    pub lambda: (u32, u32),
    /// `Y = lambda * log T`.
    pub curly_y: f64,
    pub exponent_set: Vec<Vec<u32>>,
    pub exponent_set_size: usize,
    pub w: f64,
}

/// `T = max_{f in support} B^f` with its graded-lex-largest argmax vertex.
pub fn compute_t(f: &MultiPoly, bx: &LatticeBox) -> Result<(BigInt, Vec<u32>)> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "T is undefined for the zero polynomial".into(),
        ));
    }
    if bx.n_vars() != f.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: f.n_vars(),
            got: bx.n_vars(),
        });
    }
    if let Some(&b) = bx.bounds().iter().find(|&&b| b <= 1) {
        return Err(Error::InvalidParameter(format!(
            "T needs every box bound above 1, got {b}"
        )));
    }
    let mut best: Option<(BigInt, Vec<u32>)> = None;
    for (m, _) in f.terms() {
        let val = box_power(bx, &m.0);
        let replace = match &best {
            None => true,
            Some((bv, bm)) => {
                val > *bv || (val == *bv && graded_lex_gt(&m.0, bm))
            }
        };
        if replace {
            best = Some((val, m.0.clone()));
        }
    }
    Ok(best.expect("nonzero polynomial has terms"))
}

fn box_power(bx: &LatticeBox, exps: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    for (&b, &e) in bx.bounds().iter().zip(exps) {
        if e > 0 {
            acc *= BigInt::from(b).pow(e);
        }
    }
    acc
}

fn graded_lex_gt(a: &[u32], b: &[u32]) -> bool {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    (da, a) > (db, b)
}

/// The exponent set: vectors `e >= 0` with
/// `sum e_i log B_i <= lambda log T` (exactly, as `prod B_i^{b e_i} <= T^a`
/// for `lambda = a/b`) and `e_i < m_i` for at least one `i`. Graded-lex
/// ascending.
pub fn exponent_set(
    f: &MultiPoly,
    bx: &LatticeBox,
    lambda: Ratio<u32>,
) -> Result<Vec<Vec<u32>>> {
    if lambda.is_zero() {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let (t, m_vertex) = compute_t(f, bx)?;
    let a = *lambda.numer();
    let b = *lambda.denom();
    let limit = t.pow(a); // prod B_i^{b e_i} <= T^a
    let n = bx.n_vars();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut current = vec![0u32; n];
    enumerate_exponents(
        bx,
        &limit,
        b,
        &m_vertex,
        &mut current,
        0,
        &BigInt::one(),
        &mut out,
    )?;
    out.sort_by(|x, y| {
        let dx: u32 = x.iter().sum();
        let dy: u32 = y.iter().sum();
        (dx, x).cmp(&(dy, y))
    });
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_exponents(
    bx: &LatticeBox,
    limit: &BigInt,
    b: u32,
    m_vertex: &[u32],
    current: &mut Vec<u32>,
    depth: usize,
    partial: &BigInt,
    out: &mut Vec<Vec<u32>>,
) -> Result<()> {
    if depth == current.len() {
        if current.iter().zip(m_vertex).any(|(&e, &m)| e < m) {
            if out.len() >= EXPONENT_SET_CAP {
                return Err(Error::BudgetExceeded {
                    required: out.len() as u128 + 1,
                    budget: EXPONENT_SET_CAP as u64,
                });
            }
            out.push(current.clone());
        }
        return Ok(());
    }
    let base = BigInt::from(bx.bounds()[depth]).pow(b);
    let mut acc = partial.clone();
    let mut e = 0u32;
    while acc <= *limit {
        current[depth] = e;
        enumerate_exponents(bx, limit, b, m_vertex, current, depth + 1, &acc, out)?;
        acc *= &base;
        e += 1;
    }
    current[depth] = 0;
    Ok(())
}

/// `W = exp((prod log B_i / log T)^{1/(n-1)})`; undefined for `n = 1`.
pub fn compute_w(bx: &LatticeBox, t: &BigInt) -> Result<f64> {
    let n = bx.n_vars();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "W is undefined for n = 1 (the exponent 1/(n-1) degenerates)".into(),
        ));
    }
    if t <= &BigInt::one() {
        return Err(Error::InvalidParameter("W needs T > 1".into()));
    }
    if let Some(&b) = bx.bounds().iter().find(|&&b| b <= 1) {
        return Err(Error::InvalidParameter(format!(
            "W needs every box bound above 1, got {b}"
        )));
    }
    let log_t = ln_bigint(t);
    let mut prod = 1.0f64;
    for &b in bx.bounds() {
        prod *= (b as f64).ln();
    }
    Ok(((prod / log_t).powf(1.0 / (n as f64 - 1.0))).exp())
}

/// Natural log of a positive big integer, stable for any size.
pub fn ln_bigint(t: &BigInt) -> f64 {
    let mag = t.magnitude();
    let bits = mag.bits();
    if bits <= 52 {
        return mag.to_f64().unwrap().ln();
    }
    let shift = bits - 52;
    let top = (mag >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Assembled determinant-method parameters; requires `n >= 2` for `W`.
pub fn det_params(f: &MultiPoly, bx: &LatticeBox, lambda: Ratio<u32>) -> Result<DetParams> {
    let (t, m_vertex) = compute_t(f, bx)?;
    let exps = exponent_set(f, bx, lambda)?;
    let w = compute_w(bx, &t)?;
    let log_t = ln_bigint(&t);
    let lam = *lambda.numer() as f64 / *lambda.denom() as f64;
    let mut support: Vec<Vec<u32>> = f.terms().map(|(m, _)| m.0.clone()).collect();
    support.sort_by(|x, y| {
        let dx: u32 = x.iter().sum();
        let dy: u32 = y.iter().sum();
        (dx, x).cmp(&(dy, y))
    });
    Ok(DetParams {
        support,
        t: t.to_string(),
        log_t,
        m_vertex,
        lambda: (*lambda.numer(), *lambda.denom()),
        curly_y: lam * log_t,
        exponent_set_size: exps.len(),
        exponent_set: exps,
        w,
    })
}

/// The prime-product window `(W T^eps, W T^{2 eps}]` from which the
/// determinant method draws its modulus `Q`. Only the window itself is
/// computable; no claim is made about the resulting auxiliary hypersurface.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QWindow {
    pub epsilon: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn q_window(bx: &LatticeBox, t: &BigInt, epsilon: f64) -> Result<QWindow> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let w = compute_w(bx, t)?;
    let log_t = ln_bigint(t);
    let log_lower = w.ln() + epsilon * log_t;
    let log_upper = w.ln() + 2.0 * epsilon * log_t;
    Ok(QWindow {
        epsilon,
        log_lower,
        log_upper,
        lower: log_lower.exp(),
        upper: log_upper.exp(),
    })
}

/// The exponent `sqrt(eta (1 - k eta / d))` and the `k > 3d/4` threshold.
#[derive(Debug, Clone, Serialize)]
pub struct EtaReport {
    pub eta: (i64, i64),
    /// `eta (1 - k eta / d)` as an exact rational (num, den), den > 0.
    pub inner: (String, String),
    pub exponent: f64,
    /// Maximizer of the exponent over `eta in [1, d/k]`; equals 1 whenever
    /// `d <= 2k` (the vertex `d/(2k)` lies left of 1).
    pub maximizer_at_one: bool,
    /// `sqrt(1 - k/d)` at `eta = 1`, when `k <= d`.
    pub value_at_eta_one: Option<f64>,
    /// `2 sqrt(1 - k/d) < 1`, evaluated exactly as `4k > 3d`.
    pub threshold_holds: bool,
}

pub fn eta_exponent(eta: Ratio<i64>, k: u32, d: u32) -> Result<EtaReport> {
    if d < 2 || k < 2 {
        return Err(Error::InvalidParameter("eta exponent needs d >= 2, k >= 2".into()));
    }
    if eta <= Ratio::zero() || eta > Ratio::new(d as i64, k as i64) {
        return Err(Error::InvalidParameter(format!(
            "eta must lie in (0, d/k], got {eta}"
        )));
    }
    // eta (1 - k eta / d) = eta (d - k eta) / d
    let d_r = Ratio::from_integer(d as i64);
    let k_r = Ratio::from_integer(k as i64);
    let inner = eta * (d_r - k_r * eta) / d_r;
    let exponent = (*inner.numer() as f64 / *inner.denom() as f64).sqrt();
    let value_at_eta_one = if k <= d {
        Some((1.0 - k as f64 / d as f64).sqrt())
    } else {
        None
    };
    Ok(EtaReport {
        eta: (*eta.numer(), *eta.denom()),
        inner: (inner.numer().to_string(), inner.denom().to_string()),
        exponent,
        maximizer_at_one: d <= 2 * k,
        value_at_eta_one,
        threshold_holds: 4 * k > 3 * d,
    })
}

/// The saving threshold `2 sqrt(1 - k/d) < 1` as exact integer comparisons,
/// next to the integer-k admissibility bound `k >= (3d+1)/4`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdReport {
    pub k: u32,
    pub d: u32,
    /// `4k > 3d`
    pub holds: bool,
    /// `4k >= 3d + 1`
    pub integer_bound_holds: bool,
}

pub fn kfree_threshold(k: u32, d: u32) -> ThresholdReport {
    ThresholdReport {
        k,
        d,
        holds: 4 * k > 3 * d,
        integer_bound_holds: 4 * k >= 3 * d + 1,
    }
}

/// Exact monomial matrix: rows indexed by exponent vectors, columns by
/// points, entry `point_j ^ exponent_i`.
pub fn monomial_matrix(
    points: &[Vec<BigInt>],
    exponents: &[Vec<u32>],
) -> Result<Vec<Vec<BigInt>>> {
    let dim = exponents.first().map(|e| e.len()).unwrap_or(0);
    for e in exponents {
        if e.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: e.len(),
            });
        }
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
    }
    let mut rows = Vec::with_capacity(exponents.len());
    for e in exponents {
        let mut row = Vec::with_capacity(points.len());
        for p in points {
            let mut v = BigInt::one();
            for (x, &exp) in p.iter().zip(e) {
                if exp > 0 {
                    v *= x.pow(exp);
                }
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rank of an integer matrix over `F_p` by Gaussian elimination.
pub fn rank_mod_p(matrix: &[Vec<BigInt>], p: u64) -> Result<usize> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let rows = matrix.len();
    if rows == 0 {
        return Ok(0);
    }
    let cols = matrix[0].len();
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.mod_floor(&pb).to_u64().unwrap())
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = crate::modp::powmod(m[rank][col], p - 2, p);
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let factor = crate::modp::mulmod(m[r][col], inv, p);
                for c in col..cols {
                    let sub = crate::modp::mulmod(factor, m[rank][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Ok(rank)
}

/// Integers in the half-open real interval `[lo, hi)`.
fn half_open_range(lo: f64, hi: f64) -> (i64, i64) {
    ((lo.ceil()) as i64, (hi.ceil()) as i64 - 1)
}

/// `M(f; B)`: integer triples `(x, v, z)` with `f(x) = v z^k` in the
/// half-open dyadic box `B_1/2 <= x < B_1`, `B_2/2 <= v < B_2`,
/// `B_3/2 <= z < B_3`.
pub fn count_m(
    f: &MultiPoly,
    k: u32,
    b1: f64,
    b2: f64,
    b3: f64,
    budget: &Budget,
) -> Result<u64> {
    if f.n_vars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.n_vars(),
        });
    }
    if !(b1 > 0.0 && b2 > 0.0 && b3 > 0.0) {
        return Err(Error::InvalidParameter("dyadic bounds must be positive".into()));
    }
    let (x_lo, x_hi) = half_open_range(b1 / 2.0, b1);
    let (v_lo, v_hi) = half_open_range(b2 / 2.0, b2);
    let (z_lo, z_hi) = half_open_range(b3 / 2.0, b3);
    if x_hi < x_lo || z_hi < z_lo || v_hi < v_lo {
        return Ok(0);
    }
    let work = (x_hi - x_lo + 1) as u128 * (z_hi - z_lo + 1) as u128;
    budget.check_points(work)?;
    let v_lo_big = BigInt::from(v_lo);
    let v_hi_big = BigInt::from(v_hi);
    let mut count = 0u64;
    for x in x_lo..=x_hi {
        let fx = f.evaluate_i64(&[x])?;
        for z in z_lo..=z_hi.max(z_lo) {
            if z < 1 {
                continue;
            }
            let zk = BigInt::from(z).pow(k);
            let (q, r) = fx.div_rem(&zk);
            if r.is_zero() && q >= v_lo_big && q <= v_hi_big {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Result of the dyadic-range count `R(F; B, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeCount {
    pub count: u64,
    pub zero_points: u64,
}

/// `R(F; B, H)`: box points admitting `y, z` with `F(x) = y z^k`,
/// `H/2 <= z < H`, and `|y| <= max_abs_on_box / (H/2)^k` (the computable
/// rendering of `y << B^d / H^k`). Zeros of `F` are excluded and tallied.
pub fn count_r(
    f: &MultiPoly,
    k: u32,
    bx: &LatticeBox,
    h: f64,
    budget: &Budget,
) -> Result<RangeCount> {
    if f.is_zero() {
        return Err(Error::InvalidParameter(
            "R requires a nonzero polynomial".into(),
        ));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("H must be positive".into()));
    }
    let (z_lo, z_hi) = half_open_range(h / 2.0, h);
    let z_lo = z_lo.max(1);
    let zs: Vec<i64> = (z_lo..=z_hi).collect();
    let bound = f.max_abs_on_box(bx)?;
    let y_bound = bound.to_f64().unwrap_or(f64::INFINITY) / (h / 2.0).powi(k as i32);
    let zks: Vec<BigInt> = zs.iter().map(|&z| BigInt::from(z).pow(k)).collect();
    budget.check_points(bx.point_count().saturating_mul(zs.len().max(1) as u128))?;
    #[derive(Default)]
    struct Acc {
        count: u64,
        zeros: u64,
    }
    let acc = crate::scan::scan_box(
        f,
        bx,
        budget,
        Acc::default,
        |acc, _pt, v| {
            if v.is_zero() {
                acc.zeros += 1;
                return;
            }
            let vb = v.to_bigint();
            for zk in &zks {
                let (q, r) = vb.div_rem(zk);
                if r.is_zero() {
                    let y = q.abs().to_f64().unwrap_or(f64::INFINITY);
                    if y <= y_bound {
                        acc.count += 1;
                        return;
                    }
                }
            }
        },
        |mut a, b| {
            a.count += b.count;
            a.zeros += b.zeros;
            a
        },
    )?;
    Ok(RangeCount {
        count: acc.count,
        zero_points: acc.zeros,
    })
}

/// Doubling sequence of `H` values whose blocks `[H/2, H)` cover
/// `[xi2, z_max]`.
pub fn dyadic_cover(xi2: f64, z_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if z_max < xi2 {
        return out;
    }
    let mut h = 2.0 * xi2;
    loop {
        out.push(h);
        if h / 2.0 > z_max {
            break;
        }
        h *= 2.0;
        if out.len() > 128 {
            break;
        }
    }
    out
}
