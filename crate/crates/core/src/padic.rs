//! Zeros of integer polynomials in two variables over Z_p.
//!
//! The search reduces `f` modulo p, looks for a smooth residue point (which lifts by
//! Hensel's lemma) and otherwise zooms into each singular residue point through the
//! substitution `X -> x0 + pX`, `Y -> y0 + pY` followed by removal of the content.
//! Both the quartic torsors of the 2-isogeny descent and the plane cubics use it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, pow_mod_u64, Place};
use crate::error::{Error, Result};

/// Integer polynomial in X and Y, keyed by `(deg_X, deg_Y)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    pub terms: BTreeMap<(u32, u32), BigInt>,
}

impl BiPoly {
    pub fn new() -> Self {
        BiPoly::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), BigInt)>) -> Self {
        let mut p = BiPoly::new();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: (u32, u32), c: BigInt) {
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * x.pow(i) * y.pow(j))
            .sum()
    }

    pub fn dx(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * i)),
        )
    }

    pub fn dy(&self) -> BiPoly {
        BiPoly::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * j)),
        )
    }

    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_int(&self, d: &BigInt) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|(&k, c)| (k, c / d)))
    }

    /// `f(a + b X, c + d Y)`.
    pub fn substitute(&self, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> BiPoly {
        let maxi = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let maxj = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let powers = |s: &BigInt, t: &BigInt, n: usize| -> Vec<Vec<BigInt>> {
            // (s + tX)^k expanded, k = 0..=n
            let mut out = vec![vec![BigInt::one()]];
            for k in 1..=n {
                let prev = &out[k - 1];
                let mut next = vec![BigInt::zero(); k + 1];
                for (i, cf) in prev.iter().enumerate() {
                    next[i] += cf * s;
                    next[i + 1] += cf * t;
                }
                out.push(next);
            }
            out
        };
        let px = powers(a, b, maxi);
        let py = powers(c, d, maxj);
        let mut out = BiPoly::new();
        for (&(i, j), coef) in &self.terms {
            for (ii, cx) in px[i as usize].iter().enumerate() {
                if cx.is_zero() {
                    continue;
                }
                for (jj, cy) in py[j as usize].iter().enumerate() {
                    if cy.is_zero() {
                        continue;
                    }
                    out.add_term((ii as u32, jj as u32), coef * cx * cy);
                }
            }
        }
        out
    }

    /// `f` divided by the largest power of `p` dividing all coefficients.
    pub fn primitive_at(&self, p: &BigInt) -> (BiPoly, u32) {
        let c = self.content();
        if c.is_zero() {
            return (self.clone(), 0);
        }
        let v = arith::valuation_int(&c, p).unwrap();
        (self.div_int(&p.pow(v)), v)
    }
}

// ---------- univariate root finding over F_p ----------

type UPoly = Vec<u64>;

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn trim(mut a: UPoly) -> UPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> UPoly {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let inv = pow_mod_u64(*m.last().unwrap(), p - 2, p);
    while a.len() >= m.len() {
        let k = a.len() - m.len();
        let q = mulm(*a.last().unwrap(), inv, p);
        for (i, &c) in m.iter().enumerate() {
            a[k + i] = (a[k + i] + p - mulm(q, c, p)) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulm(x, y, p)) % p;
        }
    }
    trim(out)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> UPoly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = pow_mod_u64(l, p - 2, p);
        a = a.iter().map(|&c| mulm(c, inv, p)).collect();
    }
    a
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> UPoly {
    let mut result: UPoly = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn poly_eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mulm(acc, x, p) + c) % p)
}

fn split_roots(g: &[u64], p: u64, out: &mut Vec<u64>) {
    let g = trim(g.to_vec());
    match g.len() {
        0 | 1 => {}
        2 => {
            // g = g0 + g1 x
            let inv = pow_mod_u64(g[1], p - 2, p);
            out.push(mulm(p - g[0] % p, inv, p) % p);
        }
        _ => {
            let mut a = 1u64;
            loop {
                let h = poly_powmod(&[a % p, 1], (p - 1) / 2, &g, p);
                let mut h1 = h.clone();
                if h1.is_empty() {
                    h1.push(0);
                }
                h1[0] = (h1[0] + p - 1) % p;
                let d = poly_gcd(&g, &h1, p);
                if d.len() > 1 && d.len() < g.len() {
                    split_roots(&d, p, out);
                    let (q, _) = poly_divmod(&g, &d, p);
                    split_roots(&q, p, out);
                    return;
                }
                a += 1;
            }
        }
    }
}

fn poly_divmod(a: &[u64], m: &[u64], p: u64) -> (UPoly, UPoly) {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let inv = pow_mod_u64(*m.last().unwrap(), p - 2, p);
    if a.len() < m.len() {
        return (vec![], a);
    }
    let mut q = vec![0u64; a.len() - m.len() + 1];
    while a.len() >= m.len() {
        let k = a.len() - m.len();
        let c = mulm(*a.last().unwrap(), inv, p);
        q[k] = c;
        for (i, &mc) in m.iter().enumerate() {
            a[k + i] = (a[k + i] + p - mulm(c, mc, p)) % p;
        }
        a = trim(a);
    }
    (trim(q), a)
}

/// Distinct roots in F_p of a nonzero polynomial (coefficients low to high), sorted.
pub fn roots_mod_p(f: &[u64], p: u64) -> Vec<u64> {
    let f: UPoly = trim(f.iter().map(|c| c % p).collect());
    if f.len() <= 1 {
        return vec![];
    }
    if p < 64 || p <= 2 * f.len() as u64 {
        return (0..p).filter(|&x| poly_eval(&f, x, p) == 0).collect();
    }
    let xp = poly_powmod(&[0, 1], p, &f, p);
    let mut xp_minus_x = xp;
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = (xp_minus_x[1] + p - 1) % p;
    let g = poly_gcd(&f, &trim(xp_minus_x), p);
    let mut out = Vec::new();
    split_roots(&g, p, &mut out);
    out.sort();
    out.dedup();
    out
}

// ---------- the search ----------

/// A point of `Z_p^2` at which `f` passes the Hensel test
/// `v(f(x, y)) > 2 min(v(f_X), v(f_Y))`, or at which `f` vanishes exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HenselWitness {
    #[serde(with = "arith::serde_str::int")]
    pub x: BigInt,
    #[serde(with = "arith::serde_str::int")]
    pub y: BigInt,
    /// `v_p(f(x, y))`, or `None` when `f(x, y) = 0`
    pub v_value: Option<u32>,
    pub v_gradient: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Solvable(HenselWitness),
    /// every residue class died before the depth bound
    Unsolvable { depth: u32, nodes: u64 },
    /// the depth bound or node budget was hit with live classes
    Inconclusive { depth: u32, nodes: u64 },
}

/// Replays a witness: true iff it certifies a zero of `f` in `Z_p^2`.
pub fn hensel_certifies(f: &BiPoly, w: &HenselWitness, p: &BigInt) -> bool {
    let val = f.eval(&w.x, &w.y);
    if val.is_zero() {
        return true;
    }
    let vf = arith::valuation_int(&val, p).unwrap();
    let gx = f.dx().eval(&w.x, &w.y);
    let gy = f.dy().eval(&w.x, &w.y);
    let vg = [gx, gy]
        .iter()
        .filter_map(|g| arith::valuation_int(g, p))
        .min();
    match vg {
        Some(m) => vf > 2 * m,
        None => false,
    }
}

struct Chart {
    f: BiPoly,
    // original X = x_off + x_scale * X_chart, same for Y
    x_off: BigInt,
    x_scale: BigInt,
    y_off: BigInt,
    y_scale: BigInt,
    depth: u32,
}

struct Search<'a> {
    orig: &'a BiPoly,
    p: BigInt,
    pu: u64,
    max_depth: u32,
    node_cap: u64,
    nodes: u64,
    deepest: u32,
    hit_limit: bool,
}

fn reduce_u64(c: &BigInt, p: &BigInt) -> u64 {
    c.mod_floor(p).to_u64().unwrap()
}

impl<'a> Search<'a> {
    fn lift_and_certify(&self, chart: &Chart, x0: BigInt, y0: BigInt) -> HenselWitness {
        // Newton in the chart along a variable with unit derivative until the
        // Hensel test holds for the original polynomial.
        let f = &chart.f;
        let (fx, fy) = (f.dx(), f.dy());
        let use_x = !(fx.eval(&x0, &y0) % &self.p).is_zero();
        let (mut x, mut y) = (x0, y0);
        let mut modulus = self.p.clone();
        for _ in 0..64 {
            let ox = &chart.x_off + &chart.x_scale * &x;
            let oy = &chart.y_off + &chart.y_scale * &y;
            let w = self.witness_at(ox, oy);
            if hensel_certifies(self.orig, &w, &self.p) {
                return w;
            }
            modulus = &modulus * &modulus;
            let val = f.eval(&x, &y);
            let der = if use_x { fx.eval(&x, &y) } else { fy.eval(&x, &y) };
            let inv = arith::inv_mod(&der, &modulus).expect("unit derivative");
            let step = (val * inv).mod_floor(&modulus);
            if use_x {
                x = (&x - step).mod_floor(&modulus);
            } else {
                y = (&y - step).mod_floor(&modulus);
            }
        }
        unreachable!("Newton iteration converges p-adically")
    }

    fn witness_at(&self, x: BigInt, y: BigInt) -> HenselWitness {
        let val = self.orig.eval(&x, &y);
        let v_value = arith::valuation_int(&val, &self.p);
        let gx = self.orig.dx().eval(&x, &y);
        let gy = self.orig.dy().eval(&x, &y);
        let v_gradient = [gx, gy]
            .iter()
            .filter_map(|g| arith::valuation_int(g, &self.p))
            .min();
        HenselWitness {
            x,
            y,
            v_value,
            v_gradient,
        }
    }

    fn smooth(&self, f: &BiPoly, x: &BigInt, y: &BigInt) -> bool {
        !(f.dx().eval(x, y) % &self.p).is_zero() || !(f.dy().eval(x, y) % &self.p).is_zero()
    }

    fn zoom(&mut self, chart: &Chart, x0: BigInt, sx: bool, y0: BigInt, sy: bool) -> Option<HenselWitness> {
        // X -> x0 + p X (if sx), Y -> y0 + p Y (if sy)
        let one = BigInt::one();
        let bx = if sx { self.p.clone() } else { one.clone() };
        let by = if sy { self.p.clone() } else { one.clone() };
        let g = chart.f.substitute(&x0, &bx, &y0, &by);
        let (g, _) = g.primitive_at(&self.p);
        let child = Chart {
            f: g,
            x_off: &chart.x_off + &chart.x_scale * &x0,
            x_scale: &chart.x_scale * &bx,
            y_off: &chart.y_off + &chart.y_scale * &y0,
            y_scale: &chart.y_scale * &by,
            depth: chart.depth + 1,
        };
        self.visit(&child)
    }

    fn visit(&mut self, chart: &Chart) -> Option<HenselWitness> {
        self.nodes += 1;
        self.deepest = self.deepest.max(chart.depth);
        if self.nodes > self.node_cap || chart.depth > self.max_depth {
            self.hit_limit = true;
            return None;
        }
        let f = &chart.f;
        if f.is_zero() {
            return Some(self.witness_at(chart.x_off.clone(), chart.y_off.clone()));
        }
        let p = self.pu;
        // residue polynomial coefficients, grouped by powers of Y
        let max_j = f.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let max_i = f.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let mut grid = vec![vec![0u64; max_i as usize + 1]; max_j as usize + 1];
        for (&(i, j), c) in &f.terms {
            grid[j as usize][i as usize] = reduce_u64(c, &self.p);
        }
        let y_degree = (0..=max_j as usize)
            .rev()
            .find(|&j| grid[j].iter().any(|&c| c != 0));
        let Some(y_degree) = y_degree else {
            unreachable!("primitive polynomial has a nonzero reduction");
        };
        if y_degree == 0 {
            // residue depends on X only
            let u = &grid[0];
            for x0 in roots_mod_p(u, p) {
                let xb = BigInt::from(x0);
                let yb = BigInt::zero();
                if self.smooth(f, &xb, &yb) {
                    return Some(self.lift_and_certify(chart, xb, yb));
                }
                if let Some(w) = self.zoom(chart, xb, true, BigInt::zero(), false) {
                    return Some(w);
                }
            }
            return None;
        }
        for x0 in 0..p {
            let col: Vec<u64> = (0..=y_degree)
                .map(|j| poly_eval(&grid[j], x0, p))
                .collect();
            let xb = BigInt::from(x0);
            if col.iter().all(|&c| c == 0) {
                // the whole line X = x0 lies on the residue curve
                let fx = f.dx();
                for y in 0..=(y_degree as u64 + 1).min(p - 1) {
                    let yb = BigInt::from(y);
                    if !(fx.eval(&xb, &yb) % &self.p).is_zero() {
                        return Some(self.lift_and_certify(chart, xb, yb));
                    }
                }
                if let Some(w) = self.zoom(chart, xb, true, BigInt::zero(), false) {
                    return Some(w);
                }
                continue;
            }
            for y0 in roots_mod_p(&col, p) {
                let yb = BigInt::from(y0);
                if self.smooth(f, &xb, &yb) {
                    return Some(self.lift_and_certify(chart, xb, yb));
                }
                if let Some(w) = self.zoom(chart, xb.clone(), true, yb, true) {
                    return Some(w);
                }
            }
        }
        None
    }
}

/// Decides whether `f` has a zero in `Z_p^2`.
pub fn search_zp2(f: &BiPoly, p: &BigInt, max_depth: u32, node_cap: u64) -> Result<SearchOutcome> {
    let pu = p
        .to_u64()
        .filter(|&q| q < (1 << 62) && arith::is_prime_u64(q))
        .ok_or_else(|| Error::Unsupported(format!("p-adic search needs a word-sized prime, got {p}")))?;
    if f.is_zero() {
        return Ok(SearchOutcome::Solvable(HenselWitness {
            x: BigInt::zero(),
            y: BigInt::zero(),
            v_value: None,
            v_gradient: None,
        }));
    }
    let (g, _) = f.primitive_at(p);
    let mut s = Search {
        orig: f,
        p: p.clone(),
        pu,
        max_depth,
        node_cap,
        nodes: 0,
        deepest: 0,
        hit_limit: false,
    };
    let root = Chart {
        f: g,
        x_off: BigInt::zero(),
        x_scale: BigInt::one(),
        y_off: BigInt::zero(),
        y_scale: BigInt::one(),
        depth: 0,
    };
    Ok(match s.visit(&root) {
        Some(w) => SearchOutcome::Solvable(w),
        None if s.hit_limit => SearchOutcome::Inconclusive {
            depth: s.deepest,
            nodes: s.nodes,
        },
        None => SearchOutcome::Unsolvable {
            depth: s.deepest,
            nodes: s.nodes,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalStatus {
    Solvable,
    Unsolvable,
    Inconclusive,
}

/// Evidence for a local solvability verdict at one place.
///
/// At a prime, a solvable verdict carries integer projective coordinates on which
/// the Hensel test passes in the affine chart `chart`; an unsolvable one records
/// that every residue class died before `depth_bound`. At the real place the
/// witness is a floating-point point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalCertificate {
    pub place: Place,
    pub status: LocalStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_int_vec")]
    pub witness: Option<Vec<BigInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hensel: Option<HenselWitness>,
    pub depth: u32,
    pub depth_bound: u32,
    pub nodes: u64,
}

mod opt_int_vec {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => crate::arith::serde_str::int_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

impl LocalCertificate {
    pub fn real(status: LocalStatus, point: Option<Vec<f64>>) -> Self {
        LocalCertificate {
            place: Place::Real,
            status,
            chart: None,
            witness: None,
            real_witness: point,
            hensel: None,
            depth: 0,
            depth_bound: 0,
            nodes: 0,
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.status == LocalStatus::Solvable
    }
}

/// Searches the affine charts in order and stops at the first one with a zero.
/// Returns the status, the chart index and Hensel witness when solvable, and the
/// deepest level and total node count.
pub fn search_charts(
    charts: &[BiPoly],
    p: &BigInt,
    depth_bound: u32,
    node_cap: u64,
) -> Result<(LocalStatus, Option<(usize, HenselWitness)>, u32, u64)> {
    let mut depth = 0;
    let mut nodes = 0;
    let mut inconclusive = false;
    for (i, f) in charts.iter().enumerate() {
        match search_zp2(f, p, depth_bound, node_cap)? {
            SearchOutcome::Solvable(w) => return Ok((LocalStatus::Solvable, Some((i, w)), depth, nodes)),
            SearchOutcome::Unsolvable { depth: d, nodes: n } => {
                depth = depth.max(d);
                nodes += n;
            }
            SearchOutcome::Inconclusive { depth: d, nodes: n } => {
                depth = depth.max(d);
                nodes += n;
                inconclusive = true;
            }
        }
    }
    let status = if inconclusive {
        LocalStatus::Inconclusive
    } else {
        LocalStatus::Unsolvable
    };
    Ok((status, None, depth, nodes))
}

/// Brute-force oracle: does `f` have a zero modulo `p^k` at a point of `(Z/p^k)^2`?
pub fn has_zero_mod_pk(f: &BiPoly, p: u64, k: u32) -> bool {
    let m = p.pow(k);
    let mb = BigInt::from(m);
    (0..m).any(|x| {
        (0..m).any(|y| (f.eval(&BigInt::from(x), &BigInt::from(y)) % &mb).is_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn poly(terms: &[((u32, u32), i64)]) -> BiPoly {
        BiPoly::from_terms(terms.iter().map(|&(k, c)| (k, int(c))))
    }

    #[test]
    fn roots_by_splitting_match_enumeration() {
        let p = 1_000_003u64;
        // (x - 3)(x - 17)(x - 999_999)
        let f = poly_mul(&poly_mul(&[p - 3, 1], &[p - 17, 1], p), &[p - 999_999, 1], p);
        assert_eq!(roots_mod_p(&f, p), vec![3, 17, 999_999]);
        // x^2 + 1 has roots iff p = 1 mod 4; 1_000_003 = 3 mod 4
        assert!(roots_mod_p(&[1, 0, 1], p).is_empty());
        let q = 10_009u64;
        for c in 0..50u64 {
            let f = [c, 5, 0, 1];
            let brute: Vec<u64> = (0..q).filter(|&x| poly_eval(&f, x, q) == 0).collect();
            assert_eq!(roots_mod_p(&f, q), brute);
        }
    }

    #[test]
    fn substitution_and_content() {
        let f = poly(&[((2, 0), 1), ((0, 1), -3)]); // X^2 - 3Y
        let g = f.substitute(&int(1), &int(3), &int(0), &int(3)); // (1+3X)^2 - 9Y
        assert_eq!(g, poly(&[((0, 0), 1), ((1, 0), 6), ((2, 0), 9), ((0, 1), -9)]));
        let (h, v) = poly(&[((1, 0), 9), ((0, 1), 27)]).primitive_at(&int(3));
        assert_eq!((h, v), (poly(&[((1, 0), 1), ((0, 1), 3)]), 2));
    }

    #[test]
    fn squares_and_nonsquares() {
        // Y^2 - 2 has a zero in Z_7 (3^2 = 2) but not in Z_3 or Z_5
        let f = poly(&[((0, 2), 1), ((0, 0), -2)]);
        assert!(matches!(search_zp2(&f, &int(7), 10, 10_000).unwrap(), SearchOutcome::Solvable(_)));
        assert!(matches!(search_zp2(&f, &int(3), 10, 10_000).unwrap(), SearchOutcome::Unsolvable { .. }));
        assert!(matches!(search_zp2(&f, &int(5), 10, 10_000).unwrap(), SearchOutcome::Unsolvable { .. }));
        // Y^2 - 17 over Z_2 (17 = 1 mod 8): solvable, needs lifting beyond the first digit
        let f = poly(&[((0, 2), 1), ((0, 0), -17)]);
        match search_zp2(&f, &int(2), 12, 10_000).unwrap() {
            SearchOutcome::Solvable(w) => assert!(hensel_certifies(&f, &w, &int(2))),
            other => panic!("{other:?}"),
        }
        // Y^2 - 5 over Z_2: unsolvable
        let f = poly(&[((0, 2), 1), ((0, 0), -5)]);
        assert!(matches!(search_zp2(&f, &int(2), 12, 10_000).unwrap(), SearchOutcome::Unsolvable { .. }));
    }

    #[test]
    fn valuation_obstruction() {
        // 3X^3 + 9Y^3 - 1... has no zero in Z_3: 3X^3 + 9 Y^3 = 1 impossible mod 3
        let f = poly(&[((3, 0), 3), ((0, 3), 9), ((0, 0), -1)]);
        assert!(matches!(search_zp2(&f, &int(3), 10, 10_000).unwrap(), SearchOutcome::Unsolvable { .. }));
        // X^2 - 3Y^2 - 3... Z_3 zeros? X = 3a: 9a^2 - 3Y^2 - 3 -> 3a^2 - Y^2 - 1 -> Y^2 = -1 mod 3: none
        let f = poly(&[((2, 0), 1), ((0, 2), -3), ((0, 0), -3)]);
        let out = search_zp2(&f, &int(3), 10, 10_000).unwrap();
        assert!(matches!(out, SearchOutcome::Unsolvable { .. }));
        assert!(!has_zero_mod_pk(&f, 3, 3));
    }

    #[test]
    fn large_prime() {
        let p = int(119_299);
        // Y^2 = X^3 + 7 has smooth points mod any large prime
        let f = poly(&[((0, 2), 1), ((3, 0), -1), ((0, 0), -7)]);
        match search_zp2(&f, &p, 8, 1_000_000).unwrap() {
            SearchOutcome::Solvable(w) => assert!(hensel_certifies(&f, &w, &p)),
            other => panic!("{other:?}"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn agrees_with_brute_force(
                c in prop::collection::vec(-30i64..30, 6),
                pi in 0usize..3,
            ) {
                let p = [2u64, 3, 5][pi];
                // Y^2 = c0 + c1 X + ... + c4 X^4 scaled by c5 on Y^2
                let lead = if c[5] == 0 { 1 } else { c[5] };
                let f = poly(&[((0, 2), lead), ((0, 0), -c[0]), ((1, 0), -c[1]), ((2, 0), -c[2]), ((3, 0), -c[3]), ((4, 0), -c[4])]);
                prop_assume!(!f.is_zero());
                let out = search_zp2(&f, &BigInt::from(p), 12, 200_000).unwrap();
                let k = if p == 2 { 6 } else { 3 };
                let zero_mod = has_zero_mod_pk(&f, p, k);
                match &out {
                    SearchOutcome::Solvable(w) => {
                        prop_assert!(hensel_certifies(&f, w, &BigInt::from(p)));
                        prop_assert!(zero_mod);
                    }
                    SearchOutcome::Unsolvable { .. } => {}
                    SearchOutcome::Inconclusive { .. } => {}
                }
                if !zero_mod {
                    let dead = matches!(out, SearchOutcome::Unsolvable { .. });
                    prop_assert!(dead);
                }
            }
        }
    }
}
