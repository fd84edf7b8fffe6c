//! Exact integer, rational and modular arithmetic.
//!
//! Everything here works on `BigInt`/`BigRational` so that no magnitude met by the
//! sieve or by the discriminants of the family can overflow. Hot paths (primality of
//! word-sized integers) have a `u64` fast path.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Primes below one million, computed once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        sieve
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect()
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True iff `|n|` is prime. Deterministic below 2^64; beyond that 64 Miller-Rabin
/// rounds with the first 64 primes as bases (error below 2^-128).
pub fn is_prime(n: &BigInt) -> bool {
    let m = n.magnitude();
    if let Some(small) = m.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &small_primes()[..200] {
        if (m % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = m - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &small_primes()[..64] {
        let mut x = BigUint::from(a).modpow(&d, m);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % m;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol (a|n) for odd positive n.
pub fn jacobi(a: &BigInt, n: &BigInt) -> i8 {
    debug_assert!(n.is_positive() && n.is_odd());
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        if tz % 2 == 1 {
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Legendre symbol (a|p) for an odd prime p.
pub fn legendre(a: &BigInt, p: &BigInt) -> Result<i8> {
    if !p.is_positive() || p.is_even() || !is_prime(p) {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    Ok(jacobi(a, p))
}

/// The smaller square root of `a` modulo the prime `p`, or `None` when `a` is a
/// non-residue.
pub fn sqrt_mod(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let r = sqrt_mod_any(a, p)?;
    let other = (p - &r).mod_floor(p);
    Some(r.min(other))
}

// Tonelli-Shanks, with the `(p+1)/4` exponent shortcut for p = 3 mod 4.
fn sqrt_mod_any(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if p == &BigInt::from(2) {
        return Some(a);
    }
    if a.is_zero() {
        return Some(a);
    }
    if jacobi(&a, p) != 1 {
        return None;
    }
    let one = BigInt::one();
    if (p % 4u32).to_u32() == Some(3) {
        let e: BigInt = (p + &one) >> 2;
        return Some(a.modpow(&e, p));
    }
    let pm1: BigInt = p - &one;
    let s = pm1.trailing_zeros().unwrap_or(0);
    let q = &pm1 >> s;
    let mut z = BigInt::from(2);
    while jacobi(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) >> 1), p);
    while !t.is_one() {
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_int(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Exact p-adic valuation of a nonzero rational.
pub fn valuation(x: &BigRational, p: &BigInt) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let num = valuation_int(x.numer(), p).unwrap() as i64;
    let den = valuation_int(x.denom(), p).unwrap() as i64;
    Ok(num - den)
}

fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 64u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn factor_into(n: BigUint, out: &mut Vec<(BigInt, u32)>) {
    if n.is_one() {
        return;
    }
    let as_int = BigInt::from_biguint(Sign::Plus, n.clone());
    if is_prime(&as_int) {
        out.push((as_int, 1));
        return;
    }
    if let Some(r) = exact_root(&n, 2) {
        let mut sub = Vec::new();
        factor_into(r, &mut sub);
        out.extend(sub.into_iter().map(|(p, e)| (p, 2 * e)));
        return;
    }
    let d = pollard_brent(&n);
    factor_into(&n / &d, out);
    factor_into(d, out);
}

fn exact_root(n: &BigUint, k: u32) -> Option<BigUint> {
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

/// Factorization of `|n|` into primes with multiplicities, sorted by prime.
///
/// Trial division below one million, then Pollard-Brent on what is left. Adequate
/// for the structured discriminants met here, not for general hard composites.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut m = n.magnitude().clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        if (&m % p).is_zero() {
            let mut e = 0;
            while (&m % p).is_zero() {
                m /= p;
                e += 1;
            }
            out.push((BigInt::from(p), e));
        }
    }
    if !m.is_one() {
        let mut rest = Vec::new();
        factor_into(m, &mut rest);
        out.extend(rest);
    }
    out.sort();
    let mut merged: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in out {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    merged
}

/// Distinct primes dividing a nonzero integer.
pub fn prime_support(n: &BigInt) -> Vec<BigInt> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// Squarefree representative of `n` in Q^x / (Q^x)^2, carrying the sign of `n`.
pub fn squarefree_part(n: &BigInt) -> Result<SquareClass> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let mut s = BigInt::one();
    for (p, e) in factor(n) {
        if e % 2 == 1 {
            s *= p;
        }
    }
    if n.is_negative() {
        s = -s;
    }
    Ok(SquareClass(s))
}

/// Cubefree `c` with `n = c * m^3`, carrying the sign of `n`.
pub fn cubefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let mut c = BigInt::one();
    for (p, e) in factor(n) {
        c *= p.pow(e % 3);
    }
    if n.is_negative() {
        c = -c;
    }
    Ok(c)
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact integer cube root (sign preserved), if `n` is a perfect cube.
pub fn exact_cbrt(n: &BigInt) -> Option<BigInt> {
    let r = n.cbrt();
    if &r * &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Rational square root, if it exists.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(
        exact_sqrt(x.numer())?,
        exact_sqrt(x.denom())?,
    ))
}

/// Rational cube root, if it exists.
pub fn rational_cbrt(x: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(
        exact_cbrt(x.numer())?,
        exact_cbrt(x.denom())?,
    ))
}

fn eval_poly<T>(coeffs: &[T], x: &T) -> T
where
    T: Clone + Zero + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Integer roots in `[lo, hi]` of `c[0] + c[1] x + c[2] x^2 + c[3] x^3` (degree at most 3,
/// not identically zero), found exactly by bisection on monotone pieces.
///
/// Generic so that the point search can run on `i128` when the values are known to fit.
pub fn integer_roots_in_range<T>(c: &[T; 4], lo: &T, hi: &T) -> Vec<T>
where
    T: Integer + Signed + Roots + Clone + FromPrimitive,
{
    let mut deg = 3;
    while deg > 0 && c[deg].is_zero() {
        deg -= 1;
    }
    if deg == 0 || lo > hi {
        return Vec::new();
    }
    let two = T::from_i64(2).unwrap();
    let three = T::from_i64(3).unwrap();
    let mut breaks: Vec<T> = vec![lo.clone(), hi.clone()];
    let push_near = |r: T, breaks: &mut Vec<T>| {
        for k in -2i64..=2 {
            let b = r.clone() + T::from_i64(k).unwrap();
            if &b > lo && &b < hi {
                breaks.push(b);
            }
        }
    };
    match deg {
        3 => {
            // f' = 3 c3 x^2 + 2 c2 x + c1
            let a = three.clone() * c[3].clone();
            let b = two.clone() * c[2].clone();
            let disc = b.clone() * b.clone() - T::from_i64(4).unwrap() * a.clone() * c[1].clone();
            if !disc.is_negative() {
                let s = disc.sqrt();
                let den = two.clone() * a.clone();
                for num in [-b.clone() - s.clone(), -b.clone() + s.clone()] {
                    push_near(num.div_floor(&den), &mut breaks);
                }
            }
        }
        2 => {
            let den = two.clone() * c[2].clone();
            push_near((-c[1].clone()).div_floor(&den), &mut breaks);
        }
        _ => {}
    }
    breaks.sort();
    breaks.dedup();
    let f = |x: &T| eval_poly(&c[..=deg], x);
    let mut roots = Vec::new();
    for b in &breaks {
        if f(b).is_zero() {
            roots.push(b.clone());
        }
    }
    for w in breaks.windows(2) {
        let (mut l, mut r) = (w[0].clone(), w[1].clone());
        let (fl, fr) = (f(&l), f(&r));
        if fl.is_zero() || fr.is_zero() || fl.signum() == fr.signum() {
            continue;
        }
        let increasing = fr.is_positive();
        while r.clone() - l.clone() > T::one() {
            let mid = (l.clone() + r.clone()).div_floor(&two);
            let fm = f(&mid);
            if fm.is_zero() {
                roots.push(mid);
                break;
            }
            if fm.is_positive() == increasing {
                r = mid;
            } else {
                l = mid;
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// All integer roots of a nonzero integer polynomial of degree at most 3.
pub fn integer_roots(c: &[BigInt; 4]) -> Vec<BigInt> {
    let mut deg = 3;
    while deg > 0 && c[deg].is_zero() {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg].abs();
    let bound: BigInt = c[..deg].iter().map(|x| x.abs()).max().unwrap() / &lead + 2;
    integer_roots_in_range(c, &-bound.clone(), &bound)
}

/// Rational roots of a rational polynomial of degree at most 3.
pub fn rational_roots(c: &[BigRational; 4]) -> Vec<BigRational> {
    let den = c
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let mut deg = 3;
    while deg > 0 && ints[deg].is_zero() {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    // Substitute x = y / lead to make the polynomial monic in y.
    let lead = ints[deg].clone();
    let mut monic = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
    for i in 0..=deg {
        monic[i] = &ints[i] * lead.pow((deg - i) as u32) / &lead;
    }
    let mut out: Vec<BigRational> = integer_roots(&monic)
        .into_iter()
        .map(|y| BigRational::new(y, lead.clone()))
        .collect();
    out.sort();
    out
}

/// An element of Q^x / (Q^x)^2, stored as its signed squarefree representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(BigInt::one())
    }

    pub fn of(n: &BigInt) -> Result<Self> {
        squarefree_part(n)
    }

    pub fn of_rational(x: &BigRational) -> Result<Self> {
        squarefree_part(&(x.numer() * x.denom()))
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_one()
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.0.gcd(&other.0);
        SquareClass(&self.0 * &other.0 / (&g * &g))
    }
}

impl Serialize for SquareClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// An element of Q_v^x / (Q_v^x)^2 with a fixed representative set:
/// `{1, u, p, up}` for odd p (u the least non-residue), `{±1, ±2, ±5, ±10}` at 2,
/// and `{1, -1}` at the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalSquareClass {
    pub place: Place,
    pub representative: i64,
}

fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| pow_mod_u64(a, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue")
}

impl LocalSquareClass {
    pub fn of(x: &BigRational, place: Place) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Zero);
        }
        let representative = match place {
            Place::Real => {
                if x.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Place::Prime(p) => {
                let pb = BigInt::from(p);
                let v = valuation(x, &pb)?;
                let pk = BigRational::from_integer(pb.pow(v.unsigned_abs() as u32));
                let unit = if v >= 0 { x / pk } else { x * pk };
                let unit = unit.numer() * unit.denom();
                if p == 2 {
                    let r = unit.mod_floor(&BigInt::from(8)).to_i64().unwrap();
                    let base = match r {
                        1 => 1,
                        3 => -5,
                        5 => 5,
                        _ => -1,
                    };
                    if v.rem_euclid(2) == 1 {
                        base * 2
                    } else {
                        base
                    }
                } else {
                    if p == 0 || !is_prime_u64(p) {
                        return Err(Error::NotOddPrime(p.to_string()));
                    }
                    let base = if jacobi(&unit, &pb) == 1 {
                        1
                    } else {
                        least_nonresidue(p) as i64
                    };
                    if v.rem_euclid(2) == 1 {
                        base * p as i64
                    } else {
                        base
                    }
                }
            }
        };
        Ok(LocalSquareClass {
            place,
            representative,
        })
    }

    pub fn is_square(&self) -> bool {
        self.representative == 1
    }

    pub fn mul(&self, other: &LocalSquareClass) -> Result<LocalSquareClass> {
        if self.place != other.place {
            return Err(Error::InvalidInput("square classes at different places".into()));
        }
        let prod = BigRational::from_integer(
            BigInt::from(self.representative) * BigInt::from(other.representative),
        );
        LocalSquareClass::of(&prod, self.place)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Lowest common denominator of a list of rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapters writing big integers and rationals as decimal strings (`"p/q"`).
pub mod serde_str {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn parse_rational(s: &str) -> Result<BigRational, String> {
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|e| format!("{e}"))?;
                let d: BigInt = d.trim().parse().map_err(|e| format!("{e}"))?;
                if d == BigInt::from(0) {
                    return Err("zero denominator".into());
                }
                Ok(BigRational::new(n, d))
            }
            None => Ok(BigRational::from_integer(
                s.trim().parse().map_err(|e| format!("{e}"))?,
            )),
        }
    }

    pub mod int {
        use super::*;
        pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&x.to_string())
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
            String::deserialize(d)?.parse().map_err(D::Error::custom)
        }
    }

    pub mod int_vec {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|x| x.parse().map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod rat {
        use super::*;
        pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&x.to_string())
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            parse_rational(&String::deserialize(d)?).map_err(D::Error::custom)
        }
    }

    pub mod rat_vec {
        use super::*;
        use serde::ser::SerializeSeq;
        pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|x| parse_rational(x).map_err(D::Error::custom))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primality_small_and_family_values() {
        assert!(is_prime(&int(19)));
        assert!(!is_prime(&int(1)));
        assert!(is_prime(&int(119299)));
        assert!(is_prime(&int(-101)));
        assert!(!is_prime(&int(0)));
    }

    #[test]
    fn primality_matches_trial_division_to_a_million() {
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime_u64(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn primality_beyond_64_bits() {
        // 2^89 - 1 is a Mersenne prime, 2^67 - 1 is not.
        let m89 = (BigInt::one() << 89) - 1;
        let m67 = (BigInt::one() << 67) - 1;
        assert!(is_prime(&m89));
        assert!(!is_prime(&m67));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(&int(2), &int(3)).unwrap(), -1);
        assert_eq!(legendre(&int(0), &int(7)).unwrap(), 0);
        assert_eq!(legendre(&int(6), &int(19)).unwrap(), 1);
        assert!(legendre(&int(2), &int(9)).is_err());
        assert!(legendre(&int(2), &int(2)).is_err());
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(&int(72), &int(17)), Some(int(2)));
        // exhaustive oracle mod 17
        let roots: Vec<i64> = (0..17).filter(|r| (r * r - 72i64).rem_euclid(17) == 0).collect();
        assert_eq!(roots, vec![2, 15]);
        assert_eq!(sqrt_mod(&int(1), &int(101)), Some(int(1)));
        assert_eq!(sqrt_mod(&int(1), &int(113)), Some(int(1)));
        assert_eq!(sqrt_mod(&int(2), &int(3)), None);
    }

    #[test]
    fn sqrt_mod_tonelli_branch() {
        // p = 1 mod 8 forces the full Tonelli-Shanks loop
        let p = int(113);
        for a in 1..113 {
            let a = int(a);
            match sqrt_mod(&a, &p) {
                Some(r) => assert_eq!((&r * &r - &a).mod_floor(&p), BigInt::zero()),
                None => assert_eq!(jacobi(&a, &p), -1),
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(-432), &int(2)).unwrap(), 4);
        assert_eq!(
            valuation(&BigRational::new(int(1), int(9)), &int(3)).unwrap(),
            -2
        );
        let h = int(19);
        let disc = -(int(2).pow(10u32))
            * int(3).pow(9u32)
            * h.pow(3u32)
            * int(17).pow(2u32)
            * int(13).pow(6u32)
            * int(11);
        assert_eq!(valuation(&BigRational::from_integer(disc), &int(19)).unwrap(), 3);
        assert_eq!(valuation(&rat(0), &int(3)), Err(Error::ZeroValuation));
    }

    #[test]
    fn squarefree_and_cubefree_examples() {
        let n = int(-108) * int(19).pow(3u32) * int(11);
        assert_eq!(squarefree_part(&n).unwrap().representative(), &int(-627));
        assert_eq!(squarefree_part(&int(8)).unwrap().representative(), &int(2));
        assert_eq!(cubefree_part(&int(16)).unwrap(), int(2));
        assert_eq!(cubefree_part(&int(-54)).unwrap(), int(-2));
        assert!(squarefree_part(&int(0)).is_err());
    }

    #[test]
    fn factor_handles_large_prime_cofactors() {
        let p = BigInt::from(1_000_003u64);
        let q = BigInt::from(998_244_353u64);
        let n = &p * &p * &q * 12;
        assert_eq!(
            factor(&n),
            vec![(int(2), 2), (int(3), 1), (p.clone(), 2), (q.clone(), 1)]
        );
    }

    #[test]
    fn local_square_classes() {
        let c = LocalSquareClass::of(&rat(-627), Place::Prime(2)).unwrap();
        // -627 = 5 mod 8
        assert_eq!(c.representative, 5);
        let c = LocalSquareClass::of(&rat(12), Place::Prime(2)).unwrap();
        assert_eq!(c.representative, -5);
        let c = LocalSquareClass::of(&rat(6), Place::Prime(3)).unwrap();
        assert_eq!(c.representative, 6);
        let c = LocalSquareClass::of(&rat(-3), Place::Real).unwrap();
        assert_eq!(c.representative, -1);
        let s = LocalSquareClass::of(&rat(4), Place::Prime(7)).unwrap();
        assert!(s.is_square());
    }

    #[test]
    fn integer_roots_exact() {
        // (x - 3)(x + 5)(2x - 7)
        let c = [int(105), int(-44), int(-3), int(2)];
        assert_eq!(integer_roots(&c), vec![int(-5), int(3)]);
        let c = [int(-1), int(0), int(0), int(1)];
        assert_eq!(integer_roots(&c), vec![int(1)]);
        // double root at 4
        let c = [int(-16), int(8), int(-1), int(0)];
        assert_eq!(integer_roots(&c), vec![int(4)]);
        let r = rational_roots(&[rat(-7), rat(2), rat(0), rat(0)]);
        assert_eq!(r, vec![BigRational::new(int(7), int(2))]);
    }

    #[test]
    fn integer_roots_i128_path_agrees() {
        let c: [i128; 4] = [105, -44, -3, 2];
        assert_eq!(integer_roots_in_range(&c, &-100, &100), vec![-5, 3]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn legendre_is_multiplicative(a in 1i64..10_000, b in 1i64..10_000) {
                let p = int(10007);
                prop_assume!(a % 10007 != 0 && b % 10007 != 0);
                let lhs = legendre(&int(a * b), &p).unwrap();
                let rhs = legendre(&int(a), &p).unwrap() * legendre(&int(b), &p).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn sqrt_mod_is_a_root(a in 0i64..100_000, pi in 1usize..500) {
                let p = int(small_primes()[pi] as i64);
                match sqrt_mod(&int(a), &p) {
                    Some(r) => prop_assert_eq!((&r * &r - int(a)).mod_floor(&p), BigInt::zero()),
                    None => prop_assert_eq!(legendre(&int(a), &p).unwrap(), -1),
                }
            }

            #[test]
            fn squarefree_and_cubefree_reconstruct(n in prop::num::i64::ANY.prop_filter("nonzero", |n| *n != 0)) {
                let n = int(n);
                let s = squarefree_part(&n).unwrap();
                let q = &n / s.representative();
                prop_assert!((&n % s.representative()).is_zero());
                prop_assert!(q.is_positive() && exact_sqrt(&q).is_some());
                let c = cubefree_part(&n).unwrap();
                prop_assert!((&n % &c).is_zero());
                prop_assert!(exact_cbrt(&(&n / &c)).is_some());
            }

            #[test]
            fn integer_roots_find_planted_roots(r1 in -1000i64..1000, r2 in -1000i64..1000, k in 1i64..50, s in -50i64..50) {
                // k (x - r1)(x - r2)(x - s/k) has integer roots r1, r2 and possibly s/k
                let (a, b) = (int(r1), int(r2));
                let c3 = int(k);
                let c2 = -(int(k) * (&a + &b) + int(s));
                let c1 = int(k) * &a * &b + int(s) * (&a + &b);
                let c0 = -(int(s) * &a * &b);
                let roots = integer_roots(&[c0, c1, c2, c3]);
                prop_assert!(roots.contains(&a) && roots.contains(&b));
                if s % k == 0 { prop_assert!(roots.contains(&int(s / k))); }
            }
        }
    }
}
