//! Descent by 2-isogeny on `y^2 = x^3 + a x^2 + b x`.
//!
//! Selmer membership of a class `d` is decided by local solvability of the torsor
//! `w^2 = d u^4 + a u^2 z^2 + (b/d) z^4` at the real place and at every prime
//! dividing `2 b (a^2 - 4b)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, Place, SquareClass};
use crate::curves::{phi_codomain_coeffs, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::padic::{self, BiPoly, LocalCertificate, LocalStatus};

const NODE_CAP: u64 = 2_000_000;

/// `Forward` computes Sel^(phi)(E) from torsors built on the coefficients of E';
/// `Dual` computes Sel^(phi-hat)(E') from torsors built on those of E.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Dual,
}

/// The torsor `d w^2 = d^2 u^4 + a d u^2 z^2 + b z^4`, handled in the equivalent
/// form `w^2 = d u^4 + a u^2 z^2 + (b/d) z^4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticTorsor {
    pub d: SquareClass,
    pub a: BigInt,
    pub b: BigInt,
}

impl QuarticTorsor {
    pub fn new(d: SquareClass, a: BigInt, b: BigInt) -> Result<Self> {
        if b.is_zero() || !(&b % d.representative()).is_zero() {
            return Err(Error::InvalidInput(format!("{d} does not divide {b}")));
        }
        Ok(QuarticTorsor { d, a, b })
    }

    /// Coefficients of `u^4, u^3 z, u^2 z^2, u z^3, z^4`.
    pub fn quartic(&self) -> [BigInt; 5] {
        let d = self.d.representative();
        [d.clone(), BigInt::zero(), self.a.clone(), BigInt::zero(), &self.b / d]
    }

    /// Coefficients `(d^2, a d, b)` of the form in the torsor's defining equation.
    pub fn homogeneous_coefficients(&self) -> [BigInt; 3] {
        let d = self.d.representative();
        [d * d, &self.a * d, self.b.clone()]
    }

    pub fn eval(&self, u: &BigInt, z: &BigInt) -> BigInt {
        let g = self.quartic();
        (0..5).map(|i| &g[i] * u.pow(4 - i as u32) * z.pow(i as u32)).sum()
    }

    pub fn contains(&self, u: &BigInt, z: &BigInt, w: &BigInt) -> bool {
        w * w == self.eval(u, z)
    }

    /// Invariants `(I, J, disc)` of the quartic form.
    pub fn invariants(&self) -> (BigInt, BigInt, BigInt) {
        quartic_invariants(&self.quartic())
    }

    /// The affine charts `Y^2 = g(1, X)` and `Y^2 = g(pX, 1)` covering all
    /// primitive `(u, z)` over `Z_p`.
    pub fn charts(&self, p: &BigInt) -> Vec<BiPoly> {
        let g = self.quartic();
        let mut c0 = BiPoly::from_terms([((0, 2), BigInt::one())]);
        let mut c1 = c0.clone();
        for (i, c) in g.iter().enumerate() {
            c0.add_term((i as u32, 0), -c);
            c1.add_term(((4 - i) as u32, 0), -(c * p.pow(4 - i as u32)));
        }
        vec![c0, c1]
    }

    /// Maps a chart point back to `(u, z, w)`.
    pub fn chart_point(chart: usize, x: &BigInt, y: &BigInt, p: &BigInt) -> Vec<BigInt> {
        match chart {
            0 => vec![BigInt::one(), x.clone(), y.clone()],
            _ => vec![p * x, BigInt::one(), y.clone()],
        }
    }

    /// Solvability over R: some `(u, z) != 0` with `g(u, z) >= 0`.
    pub fn really_solvable(&self) -> (bool, Option<Vec<f64>>) {
        let [d, _, a, _, e] = self.quartic();
        let (df, af, ef) = (to_f64(&d), to_f64(&self.a), to_f64(&e));
        if d.is_positive() {
            return (true, Some(vec![1.0, 0.0, df.sqrt()]));
        }
        if e.is_positive() {
            return (true, Some(vec![0.0, 1.0, ef.sqrt()]));
        }
        // d, e < 0: the maximum over t = u^2/z^2 >= 0 of d t^2 + a t + e
        if a.is_positive() && &a * &a >= BigInt::from(4) * &d * &e {
            let t = -af / (2.0 * df);
            let g = df * t * t + af * t + ef;
            return (true, Some(vec![t.sqrt(), 1.0, g.max(0.0).sqrt()]));
        }
        (false, None)
    }
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(I, J, disc)` for `a u^4 + b u^3 z + c u^2 z^2 + d u z^3 + e z^4`, with
/// `27 disc = 4 I^3 - J^2`.
pub fn quartic_invariants(g: &[BigInt; 5]) -> (BigInt, BigInt, BigInt) {
    let [a, b, c, d, e] = g;
    let i: BigInt = 12 * a * e - 3 * b * d + c * c;
    let j: BigInt = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c;
    let disc = (4 * i.pow(3) - &j * &j) / 27;
    (i, j, disc)
}

/// The class of the image of `(0, 0)` under the connecting map: the squarefree
/// part of `b'`.
pub fn alpha_image_of_zero(b_prime: &BigInt) -> Result<SquareClass> {
    SquareClass::of(b_prime)
}

/// All signed squarefree divisors of the squarefree kernel of `b'`, sorted.
pub fn candidate_classes(b_prime: &BigInt) -> Result<Vec<SquareClass>> {
    if b_prime.is_zero() {
        return Err(Error::Zero);
    }
    let primes = arith::prime_support(b_prime);
    let mut out = vec![BigInt::one(), -BigInt::one()];
    for p in &primes {
        let more: Vec<BigInt> = out.iter().map(|d| d * p).collect();
        out.extend(more);
    }
    let mut classes: Vec<SquareClass> = out.iter().map(SquareClass::of).collect::<Result<_>>()?;
    classes.sort();
    Ok(classes)
}

/// Local solvability of the torsor at one place, with certificate.
pub fn locally_solvable_quartic(t: &QuarticTorsor, place: Place) -> Result<LocalCertificate> {
    let p = match place {
        Place::Real => {
            let (ok, pt) = t.really_solvable();
            let status = if ok {
                LocalStatus::Solvable
            } else {
                LocalStatus::Unsolvable
            };
            return Ok(LocalCertificate::real(status, pt));
        }
        Place::Prime(p) => BigInt::from(p),
    };
    let (_, _, disc) = t.invariants();
    if disc.is_zero() {
        return Err(Error::Singular(format!("quartic torsor for d = {}", t.d)));
    }
    let depth_bound = 2 * arith::valuation_int(&disc, &p).unwrap() + 3;
    let charts = t.charts(&p);
    let (status, hit, depth, nodes) = padic::search_charts(&charts, &p, depth_bound, NODE_CAP)?;
    let (chart, witness, hensel) = match hit {
        Some((i, w)) => (
            Some(i),
            Some(QuarticTorsor::chart_point(i, &w.x, &w.y, &p)),
            Some(w),
        ),
        None => (None, None, None),
    };
    Ok(LocalCertificate {
        place,
        status,
        chart,
        witness,
        real_witness: None,
        hensel,
        depth,
        depth_bound,
        nodes,
    })
}

/// Replays a prime-place certificate against the torsor.
pub fn replay_certificate(t: &QuarticTorsor, cert: &LocalCertificate) -> bool {
    let Place::Prime(p) = cert.place else {
        return t.really_solvable().0 == cert.is_solvable();
    };
    let p = BigInt::from(p);
    match (cert.status, cert.chart, &cert.hensel, &cert.witness) {
        (LocalStatus::Solvable, Some(i), Some(h), Some(w)) => {
            let charts = t.charts(&p);
            i < charts.len()
                && padic::hensel_certifies(&charts[i], h, &p)
                && *w == QuarticTorsor::chart_point(i, &h.x, &h.y, &p)
        }
        (LocalStatus::Solvable, ..) => false,
        (status, ..) => {
            let again = locally_solvable_quartic(t, cert.place);
            matches!(again, Ok(c) if c.status == status)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRecord {
    pub d: SquareClass,
    pub in_selmer: bool,
    /// certificates in the order checked; the last one is the failure, if any
    pub certificates: Vec<LocalCertificate>,
}

/// A Selmer set computed from torsors. For general curves this contains the image
/// of the connecting map and may be larger.
#[derive(Debug, Clone, Serialize)]
pub struct SelmerPhiResult {
    pub direction: Direction,
    /// coefficients `(a, b)` of the curve `y^2 = x^3 + a x^2 + b x`
    #[serde(with = "arith::serde_str::int_vec")]
    pub curve: Vec<BigInt>,
    /// coefficients of the isogenous curve
    #[serde(with = "arith::serde_str::int_vec")]
    pub isogenous: Vec<BigInt>,
    pub selmer: Vec<SquareClass>,
    pub places: Vec<Place>,
    pub classes: Vec<ClassRecord>,
}

impl SelmerPhiResult {
    pub fn order(&self) -> usize {
        self.selmer.len()
    }

    pub fn contains(&self, d: &SquareClass) -> bool {
        self.selmer.contains(d)
    }
}

fn two_torsion_coefficients(e: &WeierstrassCurve) -> Result<(BigInt, BigInt)> {
    let zero = BigRational::zero();
    if e.a1 != zero || e.a3 != zero || e.a6 != zero {
        return Err(Error::NoTwoTorsion);
    }
    if !e.a2.is_integer() || !e.a4.is_integer() {
        return Err(Error::InvalidInput("expected integral coefficients".into()));
    }
    Ok((e.a2.to_integer(), e.a4.to_integer()))
}

/// Places to check, in order: real, 2, 3, then the other primes of `2 b b'` ascending.
pub fn descent_places(b: &BigInt, b_prime: &BigInt) -> Vec<Place> {
    let mut primes: Vec<u64> = arith::prime_support(&(BigInt::from(6) * b * b_prime))
        .iter()
        .map(|p| p.to_u64().expect("prime fits a word"))
        .collect();
    primes.sort();
    primes.dedup();
    std::iter::once(Place::Real)
        .chain(primes.into_iter().map(Place::Prime))
        .collect()
}

/// Sel^(phi)(E) (forward) or Sel^(phi-hat)(E') (dual) for `E: y^2 = x^3 + a x^2 + b x`.
pub fn selmer_phi(e: &WeierstrassCurve, direction: Direction) -> Result<SelmerPhiResult> {
    let (a, b) = two_torsion_coefficients(e)?;
    let (ap, bp) = phi_codomain_coeffs(&BigRational::from(a.clone()), &BigRational::from(b.clone()));
    let (ap, bp) = (ap.to_integer(), bp.to_integer());
    if bp.is_zero() || b.is_zero() {
        return Err(Error::Singular(e.label.clone()));
    }
    let (ta, tb, curve, isogenous) = match direction {
        Direction::Forward => (ap.clone(), bp.clone(), vec![a.clone(), b.clone()], vec![ap.clone(), bp.clone()]),
        Direction::Dual => (a.clone(), b.clone(), vec![ap.clone(), bp.clone()], vec![a.clone(), b.clone()]),
    };
    let places = descent_places(&b, &bp);
    let candidates = candidate_classes(&tb)?;
    let classes: Vec<ClassRecord> = candidates
        .par_iter()
        .map(|d| -> Result<ClassRecord> {
            let t = QuarticTorsor::new(d.clone(), ta.clone(), tb.clone())?;
            let mut certificates = Vec::new();
            let mut in_selmer = true;
            for &place in &places {
                let c = locally_solvable_quartic(&t, place)?;
                let status = c.status;
                certificates.push(c);
                match status {
                    LocalStatus::Solvable => {}
                    LocalStatus::Unsolvable => {
                        in_selmer = false;
                        break;
                    }
                    LocalStatus::Inconclusive => {
                        return Err(Error::Inconclusive(format!(
                            "local solvability of the torsor d = {d} at {place}"
                        )))
                    }
                }
            }
            Ok(ClassRecord {
                d: d.clone(),
                in_selmer,
                certificates,
            })
        })
        .collect::<Result<_>>()?;
    let selmer = classes
        .iter()
        .filter(|c| c.in_selmer)
        .map(|c| c.d.clone())
        .collect();
    Ok(SelmerPhiResult {
        direction,
        curve,
        isogenous,
        selmer,
        places,
        classes,
    })
}

/// `log2(#Sel^(phi) #Sel^(phi-hat) / 4)`.
pub fn rank_upper_bound(sel_fwd: usize, sel_dual: usize) -> Result<u32> {
    let prod = sel_fwd * sel_dual;
    if prod < 4 || !prod.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "Selmer orders {sel_fwd} and {sel_dual} are not compatible powers of two"
        )));
    }
    Ok(prod.trailing_zeros() - 2)
}

/// True iff `classes` is closed under multiplication.
pub fn is_subgroup(classes: &[SquareClass]) -> bool {
    classes.contains(&SquareClass::one())
        && classes
            .iter()
            .all(|x| classes.iter().all(|y| classes.contains(&x.mul(y))))
}
