//! Arithmetic in real quadratic fields Q(sqrt d) with ring of integers Z[sqrt d]
//! (d = 2, 3 mod 4, class number one): norms, units, prime splitting, and the
//! group of S-units modulo cubes with cube norm.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, exact_cbrt, exact_sqrt, integer_roots, is_prime};
use crate::error::{Error, Result};

/// Squarefree d = 2, 3 mod 4 with d < 100 for which Z[sqrt d] is a PID.
pub const CLASS_NUMBER_ONE: [u32; 21] = [
    2, 3, 6, 7, 11, 14, 19, 22, 23, 31, 38, 43, 46, 47, 59, 62, 67, 71, 83, 86, 94,
];

/// `u + v sqrt(d)` with rational `u`, `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub u: BigRational,
    pub v: BigRational,
    pub d: BigInt,
}

fn check_d(d: &BigInt) -> Result<()> {
    if d <= &BigInt::one() || arith::squarefree_part(d)?.representative() != d {
        return Err(Error::InvalidInput(format!("d = {d} is not a squarefree integer > 1")));
    }
    if (d % 4u32).to_u32() == Some(1) {
        return Err(Error::Unsupported(format!(
            "d = {d} is 1 mod 4; only Z[sqrt d] rings are supported"
        )));
    }
    Ok(())
}

impl QuadElem {
    pub fn new(u: BigRational, v: BigRational, d: BigInt) -> Self {
        QuadElem { u, v, d }
    }

    pub fn from_ints(u: i64, v: i64, d: i64) -> Self {
        QuadElem::new(arith::rat(u), arith::rat(v), BigInt::from(d))
    }

    pub fn integral(u: BigInt, v: BigInt, d: &BigInt) -> Self {
        QuadElem::new(
            BigRational::from_integer(u),
            BigRational::from_integer(v),
            d.clone(),
        )
    }

    pub fn rational(u: BigRational, d: &BigInt) -> Self {
        QuadElem::new(u, BigRational::zero(), d.clone())
    }

    pub fn one(d: &BigInt) -> Self {
        QuadElem::rational(BigRational::one(), d)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    fn same_field(&self, other: &QuadElem) -> Result<()> {
        if self.d != other.d {
            return Err(Error::MismatchedField(self.d.to_string(), other.d.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        Ok(QuadElem::new(&self.u + &other.u, &self.v + &other.v, self.d.clone()))
    }

    pub fn sub(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        Ok(QuadElem::new(&self.u - &other.u, &self.v - &other.v, self.d.clone()))
    }

    pub fn mul(&self, other: &QuadElem) -> Result<QuadElem> {
        self.same_field(other)?;
        let d = BigRational::from_integer(self.d.clone());
        Ok(QuadElem::new(
            &self.u * &other.u + &d * &self.v * &other.v,
            &self.u * &other.v + &self.v * &other.u,
            self.d.clone(),
        ))
    }

    pub fn scale(&self, c: &BigRational) -> QuadElem {
        QuadElem::new(&self.u * c, &self.v * c, self.d.clone())
    }

    pub fn neg(&self) -> QuadElem {
        QuadElem::new(-&self.u, -&self.v, self.d.clone())
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem::new(self.u.clone(), -&self.v, self.d.clone())
    }

    pub fn norm(&self) -> BigRational {
        &self.u * &self.u - BigRational::from_integer(self.d.clone()) * &self.v * &self.v
    }

    pub fn trace(&self) -> BigRational {
        &self.u + &self.u
    }

    pub fn inv(&self) -> Result<QuadElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Zero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &QuadElem) -> Result<QuadElem> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<QuadElem> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QuadElem::one(&self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_integral(&self) -> bool {
        self.u.is_integer() && self.v.is_integer()
    }

    /// Least positive integer `D` such that `D * self` is integral.
    pub fn denominator(&self) -> BigInt {
        self.u.denom().lcm(self.v.denom())
    }

    /// Integer pair `(x, y)` for an integral element.
    pub fn int_parts(&self) -> Option<(BigInt, BigInt)> {
        if self.is_integral() {
            Some((self.u.to_integer(), self.v.to_integer()))
        } else {
            None
        }
    }

    /// Real embedding with sqrt(d) > 0, as a float (for diagnostics only).
    pub fn to_f64(&self) -> f64 {
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        self.u.to_f64().unwrap_or(f64::NAN) + self.v.to_f64().unwrap_or(f64::NAN) * d.sqrt()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "{}", self.u);
        }
        let v_abs = self.v.abs();
        let coeff = if v_abs.is_one() {
            String::new()
        } else {
            format!("{v_abs}*")
        };
        let sign = if self.v.is_negative() { "-" } else { "+" };
        if self.u.is_zero() {
            let lead = if self.v.is_negative() { "-" } else { "" };
            write!(f, "{lead}{coeff}sqrt({})", self.d)
        } else {
            write!(f, "{}{sign}{coeff}sqrt({})", self.u, self.d)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QuadElemRepr {
    u_num: String,
    u_den: String,
    v_num: String,
    v_den: String,
    d: String,
}

impl Serialize for QuadElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadElemRepr {
            u_num: self.u.numer().to_string(),
            u_den: self.u.denom().to_string(),
            v_num: self.v.numer().to_string(),
            v_den: self.v.denom().to_string(),
            d: self.d.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadElem {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = QuadElemRepr::deserialize(de)?;
        let p = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        let (ud, vd) = (p(&r.u_den)?, p(&r.v_den)?);
        if ud.is_zero() || vd.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(QuadElem::new(
            BigRational::new(p(&r.u_num)?, ud),
            BigRational::new(p(&r.v_num)?, vd),
            p(&r.d)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSplitting {
    pub p: BigInt,
    pub kind: SplitKind,
    pub generator: Option<QuadElem>,
    pub conjugate_generator: Option<QuadElem>,
}

/// Decomposition of the rational prime `p` in Z[sqrt d], with generators of the
/// primes above it when they are not inert.
pub fn split_type(p: &BigInt, d: &BigInt) -> Result<PrimeSplitting> {
    check_d(d)?;
    if !p.is_positive() || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    let kind = if (d % p).is_zero() || p == &BigInt::from(2) {
        SplitKind::Ramified
    } else if arith::jacobi(d, p) == 1 {
        SplitKind::Split
    } else {
        SplitKind::Inert
    };
    let (generator, conjugate_generator) = match kind {
        SplitKind::Inert => (None, None),
        _ => {
            let (k, l) = split_prime(p, d)?;
            let g = QuadElem::integral(k.clone(), l.clone(), d);
            let c = QuadElem::integral(k, -l, d);
            (Some(g), Some(c))
        }
    };
    Ok(PrimeSplitting {
        p: p.clone(),
        kind,
        generator,
        conjugate_generator,
    })
}

/// Integers `(k, l)` with `k^2 - d l^2 = +-p`, taking the least `l > 0` and then the
/// least `k >= 0`.
pub fn split_prime(p: &BigInt, d: &BigInt) -> Result<(BigInt, BigInt)> {
    check_d(d)?;
    let ramified = (d % p).is_zero() || p == &BigInt::from(2);
    if !ramified && arith::jacobi(d, p) != 1 {
        return Err(Error::InertPrime(p.to_string(), d.to_string()));
    }
    // Some generator has an associate with |k|, |l sqrt d| <= sqrt(p * eps).
    let eps = fundamental_unit(d)?;
    let eps_ceil = (eps.u.to_integer() + eps.v.to_integer() * (d.sqrt() + 1u32)) + 1u32;
    let bound: BigInt = (p * eps_ceil / d).sqrt() + 2u32;
    let mut l = BigInt::one();
    while l <= bound {
        let dl2 = d * &l * &l;
        let mut best: Option<BigInt> = None;
        for target in [&dl2 + p, &dl2 - p] {
            if let Some(k) = exact_sqrt(&target) {
                if best.as_ref().is_none_or(|b| &k < b) {
                    best = Some(k);
                }
            }
        }
        if let Some(k) = best {
            return Ok((k, l));
        }
        l += 1u32;
    }
    Err(Error::Unsupported(format!(
        "no generator of norm +-{p} found in Z[sqrt {d}]"
    )))
}

/// Fundamental unit of Z[sqrt d], from the continued fraction of sqrt d.
pub fn fundamental_unit(d: &BigInt) -> Result<QuadElem> {
    check_d(d)?;
    let a0 = d.sqrt();
    let (mut m, mut q, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p_cur) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q_cur) = (BigInt::zero(), BigInt::one());
    loop {
        let n = &p_cur * &p_cur - d * &q_cur * &q_cur;
        if n.abs().is_one() {
            return Ok(QuadElem::integral(p_cur, q_cur, d));
        }
        m = &q * &a - &m;
        q = (d - &m * &m) / &q;
        a = (&a0 + &m) / &q;
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
}

/// Integral `(x, y)` times the least positive integer making `a` integral, together
/// with that integer.
fn integral_parts(a: &QuadElem) -> (BigInt, BigInt, BigInt) {
    let den = a.denominator();
    let c = BigRational::from_integer(den.clone());
    ((&a.u * &c).to_integer(), (&a.v * &c).to_integer(), den)
}

fn integral_cube_root(x: &BigInt, y: &BigInt, d: &BigInt) -> Option<(BigInt, BigInt)> {
    let n = x * x - d * y * y;
    let m = exact_cbrt(&n)?;
    // beta = a + b sqrt d with beta^3 = x + y sqrt d forces 4a^3 - 3 m a - x = 0.
    let coeffs = [-x.clone(), BigInt::from(-3) * &m, BigInt::zero(), BigInt::from(4)];
    for a in integer_roots(&coeffs) {
        let b2 = &a * &a - &m;
        if !(&b2 % d).is_zero() {
            continue;
        }
        let Some(b_abs) = exact_sqrt(&(&b2 / d)) else {
            continue;
        };
        for b in [b_abs.clone(), -b_abs.clone()] {
            let yy = BigInt::from(3) * &a * &a * &b + d * &b * &b * &b;
            if &yy == y {
                return Some((a.clone(), b));
            }
        }
    }
    None
}

/// Exact test for `a` being a cube in Q(sqrt d).
pub fn is_cube(a: &QuadElem) -> bool {
    if a.is_zero() {
        return true;
    }
    // a = alpha / D is a cube iff alpha * D^2 is.
    let (x, y, den) = integral_parts(a);
    let d2 = &den * &den;
    integral_cube_root(&(x * &d2), &(y * &d2), &a.d).is_some()
}

/// Cube root of `a` in Q(sqrt d), if it exists.
pub fn cube_root(a: &QuadElem) -> Option<QuadElem> {
    if a.is_zero() {
        return Some(a.clone());
    }
    let (x, y, den) = integral_parts(a);
    let d2 = &den * &den;
    let (r, s) = integral_cube_root(&(x * &d2), &(y * &d2), &a.d)?;
    let den = BigRational::from_integer(den);
    Some(QuadElem::integral(r, s, &a.d).scale(&den.recip()))
}

/// Exponents of `a` (up to a unit) on the fixed prime generators of Z[sqrt d], and the
/// exponent of the fundamental unit in the leftover unit (sign dropped: -1 is a cube).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// keyed by the generator `(k, l)` (for inert primes `(p, 0)`)
    pub primes: BTreeMap<(BigInt, BigInt), i64>,
    pub unit_exponent: i64,
}

fn divide_out(alpha: &mut QuadElem, pi: &QuadElem) -> i64 {
    let mut e = 0;
    loop {
        let q = alpha.div(pi).expect("nonzero prime");
        if q.is_integral() {
            *alpha = q;
            e += 1;
        } else {
            return e;
        }
    }
}

fn factorize_integral(alpha: &QuadElem) -> Result<Factorization> {
    let d = alpha.d.clone();
    let mut alpha = alpha.clone();
    let mut primes: BTreeMap<(BigInt, BigInt), i64> = BTreeMap::new();
    let norm = alpha.norm().to_integer();
    for p in arith::prime_support(&norm) {
        let sp = split_type(&p, &d)?;
        let gens: Vec<QuadElem> = match sp.kind {
            SplitKind::Inert => vec![QuadElem::integral(p.clone(), BigInt::zero(), &d)],
            SplitKind::Ramified => vec![sp.generator.clone().unwrap()],
            SplitKind::Split => vec![
                sp.generator.clone().unwrap(),
                sp.conjugate_generator.clone().unwrap(),
            ],
        };
        for g in gens {
            let e = divide_out(&mut alpha, &g);
            if e != 0 {
                primes.insert(g.int_parts().unwrap(), e);
            }
        }
    }
    let n = alpha.norm();
    if !n.abs().is_one() {
        return Err(Error::Unsupported(format!(
            "residual element {alpha} of norm {n} is not a unit"
        )));
    }
    let eps = fundamental_unit(&d)?;
    let eps_inv = eps.inv()?;
    let mut k = 0i64;
    while !alpha.v.is_zero() {
        // |alpha| > 1 in the real embedding iff u and v share a sign.
        if alpha.u.is_positive() == alpha.v.is_positive() {
            alpha = alpha.mul(&eps_inv)?;
            k += 1;
        } else {
            alpha = alpha.mul(&eps)?;
            k -= 1;
        }
    }
    Ok(Factorization {
        primes,
        unit_exponent: k,
    })
}

/// Factor a nonzero element into fixed prime generators and a power of the
/// fundamental unit.
pub fn factorize(a: &QuadElem) -> Result<Factorization> {
    check_d(&a.d)?;
    if a.is_zero() {
        return Err(Error::Zero);
    }
    let (x, y, den) = integral_parts(a);
    let mut f = factorize_integral(&QuadElem::integral(x, y, &a.d))?;
    if !den.is_one() {
        let g = factorize_integral(&QuadElem::integral(den, BigInt::zero(), &a.d))?;
        for (key, e) in g.primes {
            *f.primes.entry(key).or_insert(0) -= e;
        }
        f.primes.retain(|_, e| *e != 0);
        f.unit_exponent -= g.unit_exponent;
    }
    Ok(f)
}

/// Canonical representative of the class of `a` in Q(sqrt d)^x / cubes: the product of
/// fixed prime generators and the fundamental unit with exponents reduced into 0..3.
pub fn cubefree_reduce(a: &QuadElem) -> Result<QuadElem> {
    let f = factorize(a)?;
    let d = a.d.clone();
    let mut acc = fundamental_unit(&d)?.pow(f.unit_exponent.rem_euclid(3))?;
    for ((k, l), e) in f.primes {
        let g = QuadElem::integral(k, l, &d);
        acc = acc.mul(&g.pow(e.rem_euclid(3))?)?;
    }
    Ok(acc)
}

/// True iff `a` and `b` agree modulo cubes.
pub fn same_cube_class(a: &QuadElem, b: &QuadElem) -> Result<bool> {
    Ok(is_cube(&a.div(b)?))
}

/// Subgroup of Q(sqrt d)^x / cubes of classes unramified outside `S` with cube norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeClassGroup {
    pub d: BigInt,
    pub generators: Vec<QuadElem>,
    pub order: u64,
}

impl CubeClassGroup {
    /// All elements as canonical cubefree representatives, in a fixed order.
    pub fn elements(&self) -> Result<Vec<QuadElem>> {
        let mut out = vec![QuadElem::one(&self.d)];
        for g in &self.generators {
            let mut next = Vec::with_capacity(out.len() * 3);
            for e in 0..3 {
                let ge = g.pow(e)?;
                for x in &out {
                    next.push(cubefree_reduce(&x.mul(&ge)?)?);
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn contains(&self, t: &QuadElem) -> Result<bool> {
        let c = cubefree_reduce(t)?;
        Ok(self.elements()?.contains(&c))
    }
}

/// Generators of the classes supported on `S` with cube norm.
///
/// Inert primes and ramified primes cannot contribute (their norms are p^2 and
/// +-p respectively, so a cube norm forces a cube exponent); each split prime
/// p = pi pibar contributes pi^2 pibar; the fundamental unit always contributes
/// since its norm +-1 is a cube.
pub fn s_units_mod_cubes(s: &[BigInt], d: &BigInt) -> Result<CubeClassGroup> {
    check_d(d)?;
    if !d.to_u32().is_some_and(|x| CLASS_NUMBER_ONE.contains(&x)) {
        return Err(Error::Unsupported(format!(
            "class number of Q(sqrt {d}) is not known to be one"
        )));
    }
    let mut primes: Vec<BigInt> = s.iter().map(|p| p.abs()).collect();
    primes.sort();
    primes.dedup();
    let mut generators = vec![fundamental_unit(d)?];
    for p in primes {
        let sp = split_type(&p, d)?;
        if sp.kind == SplitKind::Split {
            let pi = sp.generator.unwrap();
            let pibar = sp.conjugate_generator.unwrap();
            generators.push(pi.mul(&pi)?.mul(&pibar)?);
        }
    }
    let order = 3u64.pow(generators.len() as u32);
    Ok(CubeClassGroup {
        d: d.clone(),
        generators,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn q(u: i64, v: i64) -> QuadElem {
        QuadElem::from_ints(u, v, 2)
    }

    #[test]
    fn norms_and_conjugates() {
        assert_eq!(q(1, 1).norm(), arith::rat(-1));
        assert_eq!(q(5, 2).norm(), arith::rat(17));
        let a = QuadElem::new(
            BigRational::new(int(3), int(7)),
            arith::rat(-2),
            int(2),
        );
        assert_eq!(a.conj().conj(), a);
        assert!(q(1, 1).mul(&QuadElem::from_ints(1, 1, 3)).is_err());
    }

    #[test]
    fn splitting_in_z_sqrt2() {
        let s = split_type(&int(2), &int(2)).unwrap();
        assert_eq!(s.kind, SplitKind::Ramified);
        assert_eq!(s.generator, Some(q(0, 1)));
        assert_eq!(split_type(&int(3), &int(2)).unwrap().kind, SplitKind::Inert);
        let s = split_type(&int(17), &int(2)).unwrap();
        assert_eq!(s.kind, SplitKind::Split);
        assert_eq!(s.generator, Some(q(5, 2)));
        assert_eq!(s.conjugate_generator, Some(q(5, -2)));
    }

    #[test]
    fn split_prime_examples() {
        assert_eq!(split_prime(&int(17), &int(2)).unwrap(), (int(5), int(2)));
        assert_eq!(split_prime(&int(7), &int(2)).unwrap(), (int(3), int(1)));
        assert_eq!(split_prime(&int(2), &int(2)).unwrap(), (int(0), int(1)));
        assert!(matches!(split_prime(&int(3), &int(2)), Err(Error::InertPrime(..))));
    }

    #[test]
    fn split_prime_matches_bounded_search() {
        for p in [7i64, 17, 23, 31, 41, 47, 71, 73, 79, 89, 97] {
            let (k, l) = split_prime(&int(p), &int(2)).unwrap();
            // oracle: first l with a solution
            let oracle = (1i64..100)
                .find_map(|l| {
                    (0i64..1000)
                        .find(|k| (k * k - 2 * l * l).abs() == p)
                        .map(|k| (k, l))
                })
                .unwrap();
            assert_eq!((k, l), (int(oracle.0), int(oracle.1)), "p = {p}");
        }
    }

    #[test]
    fn fundamental_units() {
        assert_eq!(fundamental_unit(&int(2)).unwrap(), q(1, 1));
        assert_eq!(fundamental_unit(&int(3)).unwrap(), QuadElem::from_ints(2, 1, 3));
        assert_eq!(fundamental_unit(&int(7)).unwrap(), QuadElem::from_ints(8, 3, 7));
        assert_eq!(
            fundamental_unit(&int(94)).unwrap(),
            QuadElem::from_ints(2143295, 221064, 94)
        );
        for &d in &CLASS_NUMBER_ONE {
            let e = fundamental_unit(&int(d as i64)).unwrap();
            assert!(e.norm().abs().is_one());
        }
        assert!(fundamental_unit(&int(5)).is_err());
    }

    #[test]
    fn cubes() {
        assert_eq!(q(1, 1).pow(3).unwrap(), q(7, 5));
        assert!(is_cube(&q(7, 5)));
        assert!(!is_cube(&q(1, 1)));
        assert!(is_cube(&q(-8, 0)));
        let third = QuadElem::new(BigRational::new(int(7), int(27)), BigRational::new(int(5), int(27)), int(2));
        assert!(is_cube(&third));
        assert_eq!(cube_root(&third).unwrap(), q(1, 1).scale(&BigRational::new(int(1), int(3))));
    }

    #[test]
    fn cubefree_reduction() {
        let a = q(5, 2).scale(&arith::rat(8));
        assert_eq!(cubefree_reduce(&a).unwrap(), q(5, 2));
        let b = q(5, 2).mul(&q(1, 1).pow(4).unwrap()).unwrap();
        let r = cubefree_reduce(&b).unwrap();
        assert_eq!(r, q(1, 1).mul(&q(5, 2)).unwrap());
        assert_eq!(cubefree_reduce(&r).unwrap(), r);
        assert_eq!(cubefree_reduce(&q(-1, 0)).unwrap(), q(1, 0));
        let frac = QuadElem::new(BigRational::new(int(1), int(3)), arith::rat(0), int(2));
        // 1/3 ~ 9 modulo cubes
        assert_eq!(cubefree_reduce(&frac).unwrap(), q(9, 0));
    }

    #[test]
    fn s_units_for_the_family_at_19() {
        let s: Vec<BigInt> = [2, 3, 11, 13, 17, 19].iter().map(|&p| int(p)).collect();
        let g = s_units_mod_cubes(&s, &int(2)).unwrap();
        assert_eq!(g.order, 9);
        assert_eq!(g.generators, vec![q(1, 1), q(85, 34)]);
        // (5+2 sqrt2)^2 (5-2 sqrt2) = 17 (5 + 2 sqrt 2)
        let expected = q(5, 2).pow(2).unwrap().mul(&q(5, -2)).unwrap();
        assert_eq!(g.generators[1], expected);
        assert_eq!(g.elements().unwrap().len(), 9);
    }

    #[test]
    fn s_units_small_sets() {
        let g = s_units_mod_cubes(&[int(3)], &int(2)).unwrap();
        assert_eq!((g.generators.clone(), g.order), (vec![q(1, 1)], 3));
        assert_eq!(q(1, 1).norm(), arith::rat(-1));
        assert!(exact_cbrt(&int(-1)).is_some());
        let g = s_units_mod_cubes(&[], &int(2)).unwrap();
        assert_eq!(g.order, 3);
        assert!(matches!(s_units_mod_cubes(&[], &int(10)), Err(Error::Unsupported(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn elem() -> impl Strategy<Value = QuadElem> {
            (-200i64..200, -200i64..200, 1i64..20)
                .prop_filter("nonzero", |(u, v, _)| *u != 0 || *v != 0)
                .prop_map(|(u, v, den)| {
                    QuadElem::new(BigRational::new(int(u), int(den)), arith::rat(v), int(2))
                })
        }

        proptest! {
            #[test]
            fn norm_is_multiplicative(a in elem(), b in elem()) {
                prop_assert_eq!(a.mul(&b).unwrap().norm(), a.norm() * b.norm());
            }

            #[test]
            fn splitting_agrees_with_legendre(pi in 1usize..300) {
                let p = int(arith::small_primes()[pi] as i64);
                for d in [2i64, 3, 7, 11] {
                    let d = int(d);
                    if (&d % &p).is_zero() { continue; }
                    let kind = split_type(&p, &d).unwrap().kind;
                    prop_assert_eq!(kind == SplitKind::Split, arith::legendre(&d, &p).unwrap() == 1);
                }
            }

            #[test]
            fn cube_class_is_stable(a in elem(), b in elem()) {
                let r = cubefree_reduce(&a).unwrap();
                prop_assert_eq!(cubefree_reduce(&r).unwrap(), r.clone());
                let shifted = a.mul(&b.pow(3).unwrap()).unwrap();
                prop_assert_eq!(cubefree_reduce(&shifted).unwrap(), r.clone());
                prop_assert!(same_cube_class(&a, &r).unwrap());
                prop_assert!(is_cube(&b.pow(3).unwrap()));
            }

            #[test]
            fn group_generators_have_cube_norm(extra in prop::collection::vec(0usize..40, 0..4)) {
                let s: Vec<BigInt> = extra.iter().map(|&i| int(arith::small_primes()[i] as i64)).collect();
                let g = s_units_mod_cubes(&s, &int(2)).unwrap();
                for gen in &g.generators {
                    prop_assert!(exact_cbrt(&gen.norm().to_integer()).is_some());
                    prop_assert!(!is_cube(gen));
                    for (p, _) in arith::factor(&gen.norm().to_integer()) {
                        prop_assert!(s.contains(&p));
                    }
                }
            }
        }
    }
}
