//! Ternary cubic forms and their invariants S, T and discriminant T^2 + 64 S^3.
//!
//! Coefficients are named after the classical layout
//! `a x^3 + b y^3 + c z^3 + 3a2 x^2y + 3a3 x^2z + 3b1 xy^2 + 3b3 y^2z + 3c1 xz^2
//!  + 3c2 yz^2 + 6m xyz`, normalised so that the Hesse form `x^3 + y^3 + z^3 + 6m xyz`
//! has `S = m - m^4` and `T = 1 - 20m^3 - 8m^6`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, rat};
use crate::error::{Error, Result};

/// Polynomial in three variables with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriPoly {
    pub terms: BTreeMap<[u32; 3], BigRational>,
}

impl TriPoly {
    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; 3], BigRational)>) -> Self {
        let mut p = TriPoly::default();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: [u32; 3], c: BigRational) {
        let e = self.terms.entry(k).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: [u32; 3]) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &TriPoly) -> TriPoly {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn scale(&self, s: &BigRational) -> TriPoly {
        TriPoly::from_terms(self.terms.iter().map(|(k, c)| (*k, c * s)))
    }

    pub fn mul(&self, o: &TriPoly) -> TriPoly {
        let mut out = TriPoly::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                out.add_term([k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]], c1 * c2);
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> TriPoly {
        TriPoly::from_terms(self.terms.iter().filter(|(k, _)| k[var] > 0).map(|(k, c)| {
            let mut k2 = *k;
            k2[var] -= 1;
            (k2, c * BigRational::from(BigInt::from(k[var])))
        }))
    }

    pub fn eval(&self, x: &[BigRational; 3]) -> BigRational {
        self.terms
            .iter()
            .map(|(k, c)| c * x[0].pow(k[0] as i32) * x[1].pow(k[1] as i32) * x[2].pow(k[2] as i32))
            .sum()
    }

    /// `F(sum_j g[0][j] x_j, sum_j g[1][j] x_j, sum_j g[2][j] x_j)`.
    pub fn linear_substitute(&self, g: &[[BigRational; 3]; 3]) -> TriPoly {
        let lin: Vec<TriPoly> = (0..3)
            .map(|i| {
                TriPoly::from_terms((0..3).map(|j| {
                    let mut k = [0; 3];
                    k[j] = 1;
                    (k, g[i][j].clone())
                }))
            })
            .collect();
        let one = TriPoly::from_terms([([0, 0, 0], BigRational::one())]);
        let mut out = TriPoly::default();
        for (k, c) in &self.terms {
            let mut term = one.scale(c);
            for (i, l) in lin.iter().enumerate() {
                for _ in 0..k[i] {
                    term = term.mul(l);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

fn det3(m: &[[TriPoly; 3]; 3]) -> TriPoly {
    let t1 = m[0][0].mul(&m[1][1].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][1])));
    let t2 = m[0][1].mul(&m[1][0].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][0])));
    let t3 = m[0][2].mul(&m[1][0].mul(&m[2][1]).sub(&m[1][1].mul(&m[2][0])));
    t1.sub(&t2).add(&t3)
}

/// Determinant of the matrix of second partial derivatives.
pub fn hessian(f: &TriPoly) -> TriPoly {
    let d: Vec<TriPoly> = (0..3).map(|i| f.derivative(i)).collect();
    let m: [[TriPoly; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| d[i].derivative(j)));
    det3(&m)
}

/// A ternary cubic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryCubic {
    pub form: TriPoly,
}

/// `alpha = HESS_ALPHA * S^2` in `Hess(Hess F) = alpha F + beta Hess F`.
const HESS_ALPHA: i64 = 80_621_568;
/// `T = beta / HESS_BETA`.
const HESS_BETA: i64 = 93_312;

impl TernaryCubic {
    pub fn new(form: TriPoly) -> Result<Self> {
        if form.is_zero() || form.terms.keys().any(|k| k.iter().sum::<u32>() != 3) {
            return Err(Error::InvalidInput("not a nonzero homogeneous cubic".into()));
        }
        Ok(TernaryCubic { form })
    }

    fn layout(&self) -> [BigRational; 10] {
        let f = &self.form;
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let sixth = BigRational::new(BigInt::one(), BigInt::from(6));
        [
            f.coeff([3, 0, 0]),
            f.coeff([0, 3, 0]),
            f.coeff([0, 0, 3]),
            f.coeff([2, 1, 0]) * &third,
            f.coeff([2, 0, 1]) * &third,
            f.coeff([1, 2, 0]) * &third,
            f.coeff([0, 2, 1]) * &third,
            f.coeff([1, 0, 2]) * &third,
            f.coeff([0, 1, 2]) * &third,
            f.coeff([1, 1, 1]) * &sixth,
        ]
    }

    /// The degree-4 invariant S.
    pub fn invariant_s(&self) -> BigRational {
        let [a, b, c, a2, a3, b1, b3, c1, c2, m] = self.layout();
        let m2 = &m * &m;
        &a * &b * &c * &m
            - (&b * &c * &a2 * &a3 + &c * &a * &b1 * &b3 + &a * &b * &c1 * &c2)
            - &m * (&a * &b3 * &c2 + &b * &c1 * &a3 + &c * &a2 * &b1)
            + (&a * &b1 * &c2 * &c2
                + &a * &c1 * &b3 * &b3
                + &b * &a2 * &c1 * &c1
                + &b * &c2 * &a3 * &a3
                + &c * &b3 * &a2 * &a2
                + &c * &a3 * &b1 * &b1)
            - &m2 * &m2
            + rat(2) * &m2 * (&b1 * &c1 + &c2 * &a2 + &a3 * &b3)
            - rat(3) * &m * (&a2 * &b3 * &c1 + &a3 * &b1 * &c2)
            - (&b1 * &b1 * &c1 * &c1 + &c2 * &c2 * &a2 * &a2 + &a3 * &a3 * &b3 * &b3)
            + (&c2 * &a2 * &a3 * &b3 + &a3 * &b3 * &b1 * &c1 + &b1 * &c1 * &c2 * &a2)
    }

    /// The degree-6 invariant T, read off from `Hess(Hess F) = alpha F + beta Hess F`.
    /// When `Hess F` is proportional to `F` (only for singular cubics) the pencil does
    /// not determine `beta`, and T is recovered by interpolating the degree-6
    /// polynomial `t -> T(F + t G)` through generic members of a line of forms.
    pub fn invariant_t(&self) -> BigRational {
        if let Some(t) = self.invariant_t_direct() {
            return t;
        }
        let g = TriPoly::from_terms([
            ([3, 0, 0], rat(1)),
            ([0, 3, 0], rat(2)),
            ([0, 0, 3], rat(3)),
            ([1, 1, 1], rat(1)),
            ([2, 1, 0], rat(1)),
        ]);
        let mut nodes: Vec<(BigRational, BigRational)> = Vec::new();
        let mut step = 1i64;
        while nodes.len() < 7 {
            let t = rat(step);
            step += 1;
            let member = TernaryCubic {
                form: self.form.add(&g.scale(&t)),
            };
            if let Some(v) = member.invariant_t_direct() {
                nodes.push((t, v));
            }
        }
        // Lagrange interpolation at t = 0
        let mut acc = BigRational::zero();
        for (i, (ti, vi)) in nodes.iter().enumerate() {
            let mut w = vi.clone();
            for (j, (tj, _)) in nodes.iter().enumerate() {
                if i != j {
                    w = w * (-tj) / (ti - tj);
                }
            }
            acc += w;
        }
        acc
    }

    fn invariant_t_direct(&self) -> Option<BigRational> {
        let f = &self.form;
        let h = hessian(f);
        let hh = hessian(&h);
        let (alpha, beta) = solve_pencil(&hh, f, &h)?;
        debug_assert_eq!(alpha, rat(HESS_ALPHA) * self.invariant_s().pow(2));
        Some(beta / rat(HESS_BETA))
    }

    /// `T^2 + 64 S^3`; zero iff the cubic is singular.
    pub fn discriminant(&self) -> BigRational {
        let s = self.invariant_s();
        let t = self.invariant_t();
        &t * &t + rat(64) * s.pow(3)
    }

    pub fn is_smooth(&self) -> bool {
        !self.discriminant().is_zero()
    }

    /// The form scaled to a primitive integral one.
    pub fn primitive_integral(&self) -> BTreeMap<[u32; 3], BigInt> {
        let den = arith::common_denominator(self.form.terms.values());
        let ints: BTreeMap<[u32; 3], BigInt> = self
            .form
            .terms
            .iter()
            .map(|(k, c)| (*k, (c * BigRational::from(den.clone())).to_integer()))
            .collect();
        let g = ints.values().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c));
        ints.into_iter().map(|(k, c)| (k, c / &g)).collect()
    }

    /// Discriminant of the primitive integral scaling.
    pub fn integral_discriminant(&self) -> BigRational {
        let f = TriPoly::from_terms(
            self.primitive_integral()
                .into_iter()
                .map(|(k, c)| (k, BigRational::from(c))),
        );
        TernaryCubic { form: f }.discriminant()
    }

    /// 2, 3 and the primes dividing the discriminant of the primitive integral form.
    pub fn bad_primes(&self) -> Result<Vec<BigInt>> {
        let disc = self.integral_discriminant();
        if disc.is_zero() {
            return Err(Error::Singular("plane cubic".into()));
        }
        let mut ps: Vec<BigInt> = arith::prime_support(&(disc.numer() * disc.denom()));
        ps.push(BigInt::from(2));
        ps.push(BigInt::from(3));
        ps.iter_mut().for_each(|p| *p = p.abs());
        ps.sort();
        ps.dedup();
        Ok(ps)
    }
}

/// Finds the unique `(alpha, beta)` with `target = alpha f + beta h`, or `None` when
/// `h` is proportional to `f`.
fn solve_pencil(target: &TriPoly, f: &TriPoly, h: &TriPoly) -> Option<(BigRational, BigRational)> {
    let keys: Vec<[u32; 3]> = f.terms.keys().chain(h.terms.keys()).cloned().collect();
    for (i, k1) in keys.iter().enumerate() {
        for k2 in &keys[i + 1..] {
            let (a11, a12, a21, a22) = (f.coeff(*k1), h.coeff(*k1), f.coeff(*k2), h.coeff(*k2));
            let det = &a11 * &a22 - &a12 * &a21;
            if det.is_zero() {
                continue;
            }
            let (r1, r2) = (target.coeff(*k1), target.coeff(*k2));
            let alpha = (&r1 * &a22 - &a12 * &r2) / &det;
            let beta = (&a11 * &r2 - &a21 * &r1) / &det;
            debug_assert!(target.sub(&f.scale(&alpha)).sub(&h.scale(&beta)).is_zero());
            return Some((alpha, beta));
        }
    }
    None
}
