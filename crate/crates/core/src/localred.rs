//! Local reduction data: Tate's algorithm (Kodaira symbol, Tamagawa number,
//! local minimal model) and global minimal models over Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int};
use crate::curves::WeierstrassCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ReductionKind::Good => "good",
            ReductionKind::MultiplicativeSplit => "split multiplicative",
            ReductionKind::MultiplicativeNonsplit => "non-split multiplicative",
            ReductionKind::Additive => "additive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kodaira {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Reduction data at one prime, computed on a local minimal model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionData {
    #[serde(with = "arith::serde_str::int")]
    pub p: BigInt,
    pub kind: ReductionKind,
    pub kodaira: Kodaira,
    pub v_delta: u32,
    #[serde(rename = "c_p")]
    pub tamagawa: u32,
    pub conductor_exponent: u32,
    #[serde(skip)]
    pub minimal_model: WeierstrassCurve,
}

/// Integral long Weierstrass coefficients.
#[derive(Debug, Clone, PartialEq)]
struct Model {
    a1: BigInt,
    a2: BigInt,
    a3: BigInt,
    a4: BigInt,
    a6: BigInt,
}

impl Model {
    fn from_curve(e: &WeierstrassCurve) -> Result<Model> {
        if !e.is_integral() {
            return Err(Error::InvalidInput("Tate's algorithm needs an integral model".into()));
        }
        let c = e.coeffs().map(|a| a.to_integer());
        let [a1, a2, a3, a4, a6] = c;
        Ok(Model { a1, a2, a3, a4, a6 })
    }

    fn to_curve(&self, label: &str) -> WeierstrassCurve {
        WeierstrassCurve::from_coeffs(
            [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
                .map(|a| BigRational::from_integer(a.clone())),
            label,
        )
    }

    fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }
    fn b4(&self) -> BigInt {
        &self.a1 * &self.a3 + 2 * &self.a4
    }
    fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }
    fn b8(&self) -> BigInt {
        &self.a1 * &self.a1 * &self.a6 + 4 * &self.a2 * &self.a6 - &self.a1 * &self.a3 * &self.a4
            + &self.a2 * &self.a3 * &self.a3
            - &self.a4 * &self.a4
    }
    fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }
    fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `x = x' + r`, `y = y' + s x' + t`.
    fn rst(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Model {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        Model {
            a1: a1 + 2 * s,
            a2: a2 - s * a1 + 3 * r - s * s,
            a3: a3 + r * a1 + 2 * t,
            a4: a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }

    /// `x = p^2 x'`, `y = p^3 y'`; the caller guarantees divisibility.
    fn scale_down(&self, p: &BigInt) -> Model {
        let p2 = p * p;
        let p3 = &p2 * p;
        Model {
            a1: &self.a1 / p,
            a2: &self.a2 / &p2,
            a3: &self.a3 / &p3,
            a4: &self.a4 / (&p2 * &p2),
            a6: &self.a6 / (&p3 * &p3),
        }
    }
}

fn val(x: &BigInt, p: &BigInt) -> u32 {
    arith::valuation_int(x, p).unwrap_or(u32::MAX)
}

fn pdiv(x: &BigInt, p: &BigInt) -> bool {
    (x % p).is_zero()
}

fn pmod(x: &BigInt, p: &BigInt) -> BigInt {
    x.mod_floor(p)
}

fn inv_mod(x: &BigInt, p: &BigInt) -> BigInt {
    arith::inv_mod(x, p).expect("unit modulo p")
}

/// Does `a X^2 + b X + c` have a root modulo p?
fn quad_has_root(a: &BigInt, b: &BigInt, c: &BigInt, p: &BigInt) -> bool {
    let (a, b, c) = (pmod(a, p), pmod(b, p), pmod(c, p));
    if p == &int(2) {
        return (0i32..2).any(|x| ((&a * x * x + &b * x + &c) % 2u32).is_zero());
    }
    if a.is_zero() {
        return !b.is_zero() || c.is_zero();
    }
    let disc = &b * &b - 4 * &a * &c;
    arith::jacobi(&disc, p) >= 0
}

/// A root modulo p of `a X^2 + b X + c`, known to have a double root.
fn quad_double_root(a: &BigInt, b: &BigInt, c: &BigInt, p: &BigInt) -> BigInt {
    if p <= &int(3) {
        let mut x = BigInt::zero();
        while &x < p {
            if pdiv(&(a * &x * &x + b * &x + c), p) {
                return x;
            }
            x += 1;
        }
        unreachable!("quadratic has a double root mod p");
    }
    pmod(&(-b * inv_mod(&(2 * a), p)), p)
}

/// Number of distinct roots modulo p of `X^3 + b X^2 + c X + d`.
fn cubic_root_count(b: &BigInt, c: &BigInt, d: &BigInt, p: &BigInt) -> u32 {
    if let Some(small) = p.to_u64().filter(|&q| q < 1 << 20) {
        let f = |x: u64| -> bool {
            let x = BigInt::from(x);
            pdiv(&(&x * &x * &x + b * &x * &x + c * &x + d), p)
        };
        return (0..small).filter(|&x| f(x)).count() as u32;
    }
    // only separable cubics reach this point, so deg gcd(f, x^p - x) counts roots
    polymod_root_count(&[d.clone(), c.clone(), b.clone(), BigInt::one()], p)
}

/// Degree of gcd(f, x^p - x) for a monic cubic f modulo a large prime p.
fn polymod_root_count(f: &[BigInt], p: &BigInt) -> u32 {
    type Poly = Vec<BigInt>;
    let norm = |mut a: Poly| -> Poly {
        for c in a.iter_mut() {
            *c = pmod(c, p);
        }
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        a
    };
    let rem = |a: &Poly, m: &Poly| -> Poly {
        let mut a = norm(a.clone());
        let m = norm(m.clone());
        let lead_inv = inv_mod(m.last().unwrap(), p);
        while a.len() >= m.len() {
            let k = a.len() - m.len();
            let q = a.last().unwrap() * &lead_inv;
            for (i, c) in m.iter().enumerate() {
                a[k + i] -= &q * c;
            }
            a = norm(a);
        }
        a
    };
    let mul = |a: &Poly, b: &Poly| -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let f: Poly = norm(f.to_vec());
    // x^p mod f by square and multiply
    let mut result: Poly = vec![BigInt::one()];
    let mut base: Poly = vec![BigInt::zero(), BigInt::one()];
    let mut e = p.clone();
    while e.is_positive() {
        if e.is_odd() {
            result = rem(&mul(&result, &base), &f);
        }
        base = rem(&mul(&base, &base), &f);
        e >>= 1;
    }
    // g = x^p - x
    let mut g = result;
    if g.len() < 2 {
        g.resize(2, BigInt::zero());
    }
    g[1] -= 1;
    let mut a = f;
    let mut b = norm(g);
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    (a.len() as u32).saturating_sub(1)
}

/// A singular point of the reduction modulo p, lifted to integers.
fn singular_point(m: &Model, p: &BigInt) -> (BigInt, BigInt) {
    if p <= &int(3) {
        let pu = p.to_i64().unwrap();
        for x in 0..pu {
            for y in 0..pu {
                let (x, y) = (int(x), int(y));
                let f = &y * &y + &m.a1 * &x * &y + &m.a3 * &y
                    - &x * &x * &x
                    - &m.a2 * &x * &x
                    - &m.a4 * &x
                    - &m.a6;
                let fx = &m.a1 * &y - 3 * &x * &x - 2 * &m.a2 * &x - &m.a4;
                let fy = 2 * &y + &m.a1 * &x + &m.a3;
                if pdiv(&f, p) && pdiv(&fx, p) && pdiv(&fy, p) {
                    return (x, y);
                }
            }
        }
        unreachable!("reduction is singular");
    }
    let (b2, b4, b6) = (m.b2(), m.b4(), m.b6());
    let c4 = m.c4();
    let r = if pdiv(&c4, p) {
        // cusp: triple root of 4x^3 + b2 x^2 + 2 b4 x + b6
        pmod(&(-&b2 * inv_mod(&int(12), p)), p)
    } else {
        let c6 = -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * &b6;
        pmod(&(-inv_mod(&(12 * &c4), p) * (c6 + &b2 * &c4)), p)
    };
    let t = pmod(&(-inv_mod(&int(2), p) * (&m.a1 * &r + &m.a3)), p);
    (r, t)
}

/// Tate's algorithm at `p` for an integral model.
pub fn tate_algorithm(e: &WeierstrassCurve, p: &BigInt) -> Result<ReductionData> {
    if !p.is_positive() || !arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    if e.is_singular() {
        return Err(Error::Singular(e.label.clone()));
    }
    let mut m = Model::from_curve(e)?;
    let zero = BigInt::zero();
    let p2 = p * p;
    let p3 = &p2 * p;
    let p4 = &p2 * &p2;
    loop {
        let vpd = val(&m.disc(), p);
        if vpd == 0 {
            return Ok(finish(m, p, e, Kodaira::I(0), 0, 1, 0, None));
        }
        let (r, t) = singular_point(&m, p);
        m = m.rst(&r, &zero, &t);
        debug_assert!(pdiv(&m.a3, p) && pdiv(&m.a4, p) && pdiv(&m.a6, p));

        if !pdiv(&m.c4(), p) {
            let split = quad_has_root(&BigInt::one(), &m.a1, &-&m.a2, p);
            let cp = if split {
                vpd
            } else if vpd % 2 == 0 {
                2
            } else {
                1
            };
            return Ok(finish(m, p, e, Kodaira::I(vpd), vpd, cp, 1, Some(split)));
        }
        if val(&m.a6, p) < 2 {
            return Ok(finish(m, p, e, Kodaira::II, vpd, 1, vpd, None));
        }
        if val(&m.b8(), p) < 3 {
            return Ok(finish(m, p, e, Kodaira::III, vpd, 2, vpd - 1, None));
        }
        if val(&m.b6(), p) < 3 {
            let cp = if quad_has_root(&BigInt::one(), &(&m.a3 / p), &(-&m.a6 / &p2), p) {
                3
            } else {
                1
            };
            return Ok(finish(m, p, e, Kodaira::IV, vpd, cp, vpd - 2, None));
        }

        // arrange p | a1, a2; p^2 | a3, a4; p^3 | a6
        let (s, t) = if p == &int(2) {
            (pmod(&m.a2, p), p * pmod(&(&m.a6 / &p2), p))
        } else if p == &int(3) {
            (m.a1.clone(), m.a3.clone())
        } else {
            let half = inv_mod(&int(2), p);
            (pmod(&(-&m.a1 * &half), p), pmod(&(-&m.a3 * &half), p))
        };
        m = m.rst(&zero, &s, &t);
        debug_assert!(pdiv(&m.a1, p) && pdiv(&m.a2, p));
        debug_assert!(pdiv(&m.a3, &p2) && pdiv(&m.a4, &p2) && pdiv(&m.a6, &p3));
        let b = &m.a2 / p;
        let c = &m.a4 / &p2;
        let d = &m.a6 / &p3;
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d
            + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;
        let sw = if pdiv(&w, p) {
            if pdiv(&x, p) {
                3
            } else {
                2
            }
        } else {
            1
        };

        if sw == 1 {
            let cp = 1 + cubic_root_count(&b, &c, &d, p);
            return Ok(finish(m, p, e, Kodaira::IStar(0), vpd, cp, vpd - 4, None));
        }
        if sw == 2 {
            // move the double root of T^3 + b T^2 + c T + d to 0
            let r = if p <= &int(3) {
                let mut root = None;
                let mut tt = BigInt::zero();
                while &tt < p {
                    let f = &tt * &tt * &tt + &b * &tt * &tt + &c * &tt + &d;
                    let df = 3 * &tt * &tt + 2 * &b * &tt + &c;
                    if pdiv(&f, p) && pdiv(&df, p) {
                        root = Some(tt.clone());
                        break;
                    }
                    tt += 1;
                }
                root.expect("double root exists")
            } else {
                pmod(&((&b * &c - 9 * &d) * inv_mod(&(2 * &x), p)), p)
            };
            m = m.rst(&(p * r), &zero, &zero);
            let (mut ix, mut iy) = (3u32, 3u32);
            let (mut mx, mut my) = (p2.clone(), p2.clone());
            let cp;
            loop {
                let xa2 = &m.a2 / p;
                let xa3 = &m.a3 / &my;
                let xa6 = &m.a6 / (&mx * &my);
                if pdiv(&(&xa3 * &xa3 + 4 * &xa6), p) {
                    let y0 = quad_double_root(&BigInt::one(), &xa3, &-&xa6, p);
                    m = m.rst(&zero, &zero, &(&my * y0));
                    my = &my * p;
                    iy += 1;
                    let xa2 = &m.a2 / p;
                    let xa4 = &m.a4 / (p * &mx);
                    let xa6 = &m.a6 / (&mx * &my);
                    if pdiv(&(&xa4 * &xa4 - 4 * &xa2 * &xa6), p) {
                        let x0 = quad_double_root(&xa2, &xa4, &xa6, p);
                        m = m.rst(&(&mx * x0), &zero, &zero);
                        mx = &mx * p;
                        ix += 1;
                    } else {
                        cp = if quad_has_root(&xa2, &xa4, &xa6, p) { 4 } else { 2 };
                        break;
                    }
                } else {
                    let _ = xa2;
                    cp = if quad_has_root(&BigInt::one(), &xa3, &-&xa6, p) { 4 } else { 2 };
                    break;
                }
            }
            let n = ix + iy - 5;
            return Ok(finish(m, p, e, Kodaira::IStar(n), vpd, cp, vpd - ix - iy + 1, None));
        }

        // triple root: move it to 0
        let r = if p == &int(2) {
            pmod(&b, p)
        } else if p == &int(3) {
            pmod(&-&d, p)
        } else {
            pmod(&(-&b * inv_mod(&int(3), p)), p)
        };
        m = m.rst(&(p * r), &zero, &zero);
        let x3 = &m.a3 / &p2;
        let x6 = &m.a6 / &p4;
        if !pdiv(&(&x3 * &x3 + 4 * &x6), p) {
            let cp = if quad_has_root(&BigInt::one(), &x3, &-&x6, p) { 3 } else { 1 };
            return Ok(finish(m, p, e, Kodaira::IVStar, vpd, cp, vpd - 6, None));
        }
        let y0 = quad_double_root(&BigInt::one(), &x3, &-&x6, p);
        m = m.rst(&zero, &zero, &(&p2 * y0));
        if val(&m.a4, p) < 4 {
            return Ok(finish(m, p, e, Kodaira::IIIStar, vpd, 2, vpd - 7, None));
        }
        if val(&m.a6, p) < 6 {
            return Ok(finish(m, p, e, Kodaira::IIStar, vpd, 1, vpd - 8, None));
        }
        // not minimal: scale down and start over
        m = m.scale_down(p);
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    m: Model,
    p: &BigInt,
    e: &WeierstrassCurve,
    kodaira: Kodaira,
    vpd: u32,
    cp: u32,
    fp: u32,
    split: Option<bool>,
) -> ReductionData {
    let kind = match (kodaira, split) {
        (Kodaira::I(0), _) => ReductionKind::Good,
        (Kodaira::I(_), Some(true)) => ReductionKind::MultiplicativeSplit,
        (Kodaira::I(_), _) => ReductionKind::MultiplicativeNonsplit,
        _ => ReductionKind::Additive,
    };
    ReductionData {
        p: p.clone(),
        kind,
        kodaira,
        v_delta: vpd,
        tamagawa: cp,
        conductor_exponent: fp,
        minimal_model: m.to_curve(&e.label),
    }
}

/// Model minimal at `p` (integral at every prime where the input is).
pub fn minimal_model(e: &WeierstrassCurve, p: &BigInt) -> Result<WeierstrassCurve> {
    let e = integral_model(e);
    Ok(tate_algorithm(&e, p)?.minimal_model)
}

/// An integral model `x = x'/u^2, y = y'/u^3` with `u` the common denominator.
pub fn integral_model(e: &WeierstrassCurve) -> WeierstrassCurve {
    if e.is_integral() {
        return e.clone();
    }
    let mut u = BigInt::one();
    for (i, a) in e.coeffs().iter().enumerate() {
        let w = [1u32, 2, 3, 4, 6][i];
        // smallest u with u^w * a integral: include each prime of the denominator
        for (q, k) in arith::factor(a.denom()) {
            let need = k.div_ceil(w);
            let have = arith::valuation_int(&u, &q).unwrap_or(0);
            if need > have {
                u *= q.pow(need - have);
            }
        }
    }
    let inv = BigRational::new(BigInt::one(), u);
    let zero = BigRational::zero();
    e.transform(&inv, &zero, &zero, &zero)
}

/// Reduce a model to the normal form with a1, a3 in {0, 1} and a2 in {-1, 0, 1}.
fn normalize(m: &Model) -> Model {
    let zero = BigInt::zero();
    let two = int(2);
    let s = (pmod(&m.a1, &two) - &m.a1) / 2;
    let m = m.rst(&zero, &s, &zero);
    // a2 + 3r in {-1, 0, 1}
    let r = -((&m.a2 + int(1)).div_floor(&int(3)));
    let m = m.rst(&r, &zero, &zero);
    let t = (pmod(&m.a3, &two) - &m.a3) / 2;
    m.rst(&zero, &zero, &t)
}

/// Global minimal model (Q has class number one), in reduced normal form.
pub fn global_minimal_model(e: &WeierstrassCurve) -> Result<WeierstrassCurve> {
    if e.is_singular() {
        return Err(Error::Singular(e.label.clone()));
    }
    let mut cur = integral_model(e);
    let disc = cur.discriminant().to_integer();
    for (p, k) in arith::factor(&disc) {
        if k >= 12 || p <= int(3) {
            cur = tate_algorithm(&cur, &p)?.minimal_model;
        }
    }
    let m = Model::from_curve(&cur)?;
    Ok(normalize(&m).to_curve(&e.label))
}

/// Positive `u` with `Delta(e) = u^12 Delta(minimal)`, i.e. the scale taking the
/// invariant differential of `e` to that of its global minimal model.
pub fn minimal_scale(e: &WeierstrassCurve) -> Result<BigRational> {
    let min = global_minimal_model(e)?;
    let ratio = e.discriminant() / min.discriminant();
    let root = |n: &BigInt| -> Result<BigInt> {
        let r = n.nth_root(12);
        if r.pow(12u32) == *n {
            Ok(r)
        } else {
            Err(Error::InvalidInput("discriminant ratio is not a 12th power".into()))
        }
    };
    Ok(BigRational::new(root(ratio.numer())?, root(ratio.denom())?))
}

/// Classification of the reduction at `p`, independently of the Kodaira branches:
/// good / multiplicative from the valuations of `Delta` and `c4` on a minimal
/// model, and split / non-split from the tangent directions at the node.
pub fn reduction_type(e: &WeierstrassCurve, p: &BigInt) -> Result<ReductionKind> {
    let mut cur = integral_model(e);
    let m0 = Model::from_curve(&cur)?;
    let vd = val(&m0.disc(), p);
    if vd >= 12 && pdiv(&m0.c4(), p) {
        cur = minimal_model(&cur, p)?;
    }
    let m = Model::from_curve(&cur)?;
    if !pdiv(&m.disc(), p) {
        return Ok(ReductionKind::Good);
    }
    if pdiv(&m.c4(), p) {
        return Ok(ReductionKind::Additive);
    }
    let split = if p > &int(3) {
        // (2y + a1 x + a3)^2 = g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 has a double root
        // x0; the tangent cone at the node is Y^2 = (12 x0 + b2) X^2.
        let (b2, b4, b6) = (m.b2(), m.b4(), m.b6());
        let pu = p.clone();
        let g = |x: &BigInt| 4 * x * x * x + &b2 * x * x + 2 * &b4 * x + &b6;
        let dg = |x: &BigInt| 12 * x * x + 2 * &b2 * x + 2 * &b4;
        // the double root is a root of gcd(g, g'), found via the singular point formula
        let (r, _) = singular_point(&m, &pu);
        debug_assert!(pdiv(&g(&r), p) && pdiv(&dg(&r), p));
        arith::jacobi(&(12 * &r + &b2), p) == 1
    } else {
        let (r, t) = singular_point(&m, p);
        let shifted = m.rst(&r, &BigInt::zero(), &t);
        quad_has_root(&BigInt::one(), &shifted.a1, &-&shifted.a2, p)
    };
    Ok(if split {
        ReductionKind::MultiplicativeSplit
    } else {
        ReductionKind::MultiplicativeNonsplit
    })
}

/// Reduction data at every prime dividing the discriminant of the minimal model.
pub fn local_data(e: &WeierstrassCurve) -> Result<Vec<ReductionData>> {
    let min = global_minimal_model(e)?;
    let disc = min.discriminant().to_integer();
    arith::prime_support(&disc)
        .iter()
        .map(|p| tate_algorithm(&min, p))
        .collect()
}

pub fn tamagawa_product(e: &WeierstrassCurve) -> Result<u64> {
    Ok(local_data(e)?.iter().map(|d| d.tamagawa as u64).product())
}

/// Conductor from the local exponents.
pub fn conductor(e: &WeierstrassCurve) -> Result<BigInt> {
    Ok(local_data(e)?
        .iter()
        .fold(BigInt::one(), |acc, d| acc * d.p.pow(d.conductor_exponent)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::curves::{dual_ab, model_ab, model_c, phi_codomain, shift_two_torsion, Curve};

    fn e_h(h: i64) -> WeierstrassCurve {
        model_ab(&rat(-216), &rat(h * (h - 6) * (h - 6))).unwrap()
    }

    fn ebar_h(h: i64) -> WeierstrassCurve {
        let (a, b) = dual_ab(&rat(-216), &rat(h * (h - 6) * (h - 6)));
        model_ab(&a, &b).unwrap()
    }

    fn eprime_h(h: i64) -> WeierstrassCurve {
        let (s, _) = shift_two_torsion(&e_h(h)).unwrap();
        phi_codomain(&s.a2, &s.a4).unwrap()
    }

    #[test]
    fn known_curves() {
        // 11a1: [0,-1,1,-10,-20], I5 split at 11, conductor 11
        let e = Curve::from_ints([0, -1, 1, -10, -20], "11a1");
        let d = tate_algorithm(&e, &int(11)).unwrap();
        assert_eq!((d.kodaira, d.tamagawa, d.kind), (Kodaira::I(5), 5, ReductionKind::MultiplicativeSplit));
        assert_eq!(conductor(&e).unwrap(), int(11));
        // 37a1: [0,0,1,-1,0]
        let e = Curve::from_ints([0, 0, 1, -1, 0], "37a1");
        assert_eq!(conductor(&e).unwrap(), int(37));
        // y^2 = x^3 + 1: conductor 36, types IV at 2 (c=3) and ... at 3
        let e = model_c(&rat(1)).unwrap();
        assert_eq!(conductor(&e).unwrap(), int(36));
        // y^2 = x^3 - x: conductor 32
        let e = Curve::from_ints([0, 0, 0, -1, 0], "32a");
        assert_eq!(conductor(&e).unwrap(), int(32));
        // a non-minimal model: y^2 = x^3 - 11^4 x... scale 11a1 by u = 5
        let e = Curve::from_ints([0, -1, 1, -10, -20], "11a1");
        let big = e.transform(&BigRational::new(int(1), int(5)), &rat(0), &rat(0), &rat(0));
        let min = global_minimal_model(&big).unwrap();
        assert_eq!(min.coeffs(), e.coeffs());
        assert_eq!(minimal_scale(&big).unwrap(), rat(5));
    }

    #[test]
    fn additive_types_on_standard_examples() {
        // Cremona reference data: 27a1 [0,0,1,0,-7] type IV* at 3? (27a1: [0,0,1,0,-7], IV*, c=1)
        let e = Curve::from_ints([0, 0, 1, 0, -7], "27a1");
        let d = tate_algorithm(&e, &int(3)).unwrap();
        assert_eq!(d.kodaira, Kodaira::IVStar);
        assert_eq!(conductor(&e).unwrap(), int(27));
        // 24a1 [0,-1,0,-4,4]: I1* ... conductor 24
        let e = Curve::from_ints([0, -1, 0, -4, 4], "24a1");
        assert_eq!(conductor(&e).unwrap(), int(24));
        // 14a1 [1,0,1,4,-6]: split I6 at 2, conductor 14, c2 = 6
        let e = Curve::from_ints([1, 0, 1, 4, -6], "14a1");
        let d = tate_algorithm(&e, &int(2)).unwrap();
        assert_eq!((d.kodaira, d.tamagawa), (Kodaira::I(6), 2));
        assert_eq!(conductor(&e).unwrap(), int(14));
    }

    #[test]
    fn family_reduction_grid_at_19() {
        let e = e_h(19);
        let kinds: Vec<_> = [2, 3, 11, 13, 17, 19]
            .iter()
            .map(|&p| reduction_type(&e, &int(p)).unwrap())
            .collect();
        use ReductionKind::*;
        assert_eq!(
            kinds,
            vec![Additive, Additive, MultiplicativeNonsplit, MultiplicativeNonsplit, MultiplicativeSplit, MultiplicativeNonsplit]
        );
        for d in local_data(&e).unwrap() {
            assert_eq!(d.kind, reduction_type(&e, &d.p).unwrap());
        }
        assert_eq!(tamagawa_product(&e).unwrap(), 16);
        assert_eq!(tamagawa_product(&eprime_h(19)).unwrap(), 16);
        assert_eq!(tamagawa_product(&ebar_h(19)).unwrap(), 48);
    }

    #[test]
    fn family_products_at_13() {
        assert_eq!(tamagawa_product(&e_h(13)).unwrap(), 48);
        assert_eq!(tamagawa_product(&eprime_h(13)).unwrap(), 48);
        assert_eq!(tamagawa_product(&ebar_h(13)).unwrap(), 16);
    }

    #[test]
    fn minimal_model_of_the_isogenous_curve() {
        for h in [19i64, -101, 3259, 13] {
            let min = global_minimal_model(&ebar_h(h)).unwrap();
            // y^2 = x^3 + 8(3x - K)^2 with K = (h-2)^2 (h-8)
            let k = (h - 2) * (h - 2) * (h - 8);
            let reference = Curve::from_coeffs(
                [rat(0), rat(72), rat(0), rat(-48 * k), BigRational::from_integer(int(8) * int(k) * int(k))],
                "",
            );
            let hb = int(h);
            let delta = int(-27648) * &hb * (&hb - int(8)).pow(3u32) * (&hb - int(6)).pow(2u32) * (&hb - int(2)).pow(6u32);
            assert_eq!(min.discriminant(), BigRational::from_integer(delta.clone()));
            assert_eq!(reference.discriminant(), BigRational::from_integer(delta));
            assert_eq!(min.j_invariant(), reference.j_invariant());
            assert_eq!(minimal_scale(&ebar_h(h)).unwrap(), rat(9));
            assert_eq!(minimal_scale(&e_h(h)).unwrap(), rat(1));
        }
    }

    #[test]
    fn root_count_by_frobenius_matches_enumeration() {
        let p = int(1_000_003);
        // (x - 1)(x - 2)(x - 5), then x^3 - 2 (one root iff p = 2 mod 3)
        let f = [int(-10), int(17), int(-8), int(1)];
        assert_eq!(polymod_root_count(&f, &p), 3);
        let q = int(10_007);
        for c in 1..40i64 {
            let f = [int(-c), int(3), int(0), int(1)];
            let brute = (0..10_007i64)
                .filter(|x| (x * x % 10_007 * x + 3 * x - c).rem_euclid(10_007) == 0)
                .count() as u32;
            assert_eq!(polymod_root_count(&f, &q), brute, "c = {c}");
        }
    }

    #[test]
    fn multiplicative_tamagawa_rule() {
        for h in [19i64, -101, 3259, 13, 5659] {
            for e in [e_h(h), ebar_h(h), eprime_h(h)] {
                for d in local_data(&e).unwrap() {
                    match d.kind {
                        ReductionKind::MultiplicativeSplit => assert_eq!(d.tamagawa, d.v_delta),
                        ReductionKind::MultiplicativeNonsplit => {
                            assert_eq!(d.tamagawa, if d.v_delta % 2 == 0 { 2 } else { 1 })
                        }
                        _ => {}
                    }
                }
            }
        }
    }
}
