//! Local solvability of plane cubics at every place, and a bounded search for
//! global rational points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, Place};
use crate::error::{Error, Result};
use crate::padic::{self, BiPoly, LocalCertificate, LocalStatus};
use crate::threedescent::PlaneCubic;

const NODE_CAP: u64 = 2_000_000;

/// Primes at or below this bound are always enumerated, good reduction or not.
pub const SMALL_PRIME_BOUND: u64 = 13;

fn primitive_form(c: &PlaneCubic) -> Result<BTreeMap<[u32; 3], BigInt>> {
    let t = c.ternary();
    if !t.is_smooth() {
        return Err(Error::Singular(format!("plane cubic {}", c.render())));
    }
    Ok(t.primitive_integral())
}

/// 2, 3 and the primes dividing the discriminant of the homogenised cubic.
pub fn bad_primes(c: &PlaneCubic) -> Result<Vec<BigInt>> {
    c.ternary().bad_primes()
}

/// `v_p` of the discriminant of the primitive integral form.
fn disc_valuation(c: &PlaneCubic, p: &BigInt) -> Result<u32> {
    let disc = c.ternary().integral_discriminant();
    if disc.is_zero() {
        return Err(Error::Singular(format!("plane cubic {}", c.render())));
    }
    Ok(arith::valuation(&disc, p)?.max(0) as u32)
}

/// The three affine charts covering the primitive points of `P^2(Z_p)`:
/// `F(1, X, Y)`, `F(pX, 1, Y)`, `F(pX, pY, 1)`, each made primitive at `p`.
pub fn charts(form: &BTreeMap<[u32; 3], BigInt>, p: &BigInt) -> Vec<BiPoly> {
    let mut out = vec![BiPoly::new(), BiPoly::new(), BiPoly::new()];
    for (&[i, j, k], c) in form {
        out[0].add_term((j, k), c.clone());
        out[1].add_term((i, k), c * p.pow(i));
        out[2].add_term((i, j), c * p.pow(i + j));
    }
    out.into_iter().map(|f| f.primitive_at(p).0).collect()
}

/// Projective `(w, z, v)` of a chart point.
pub fn chart_point(chart: usize, x: &BigInt, y: &BigInt, p: &BigInt) -> Vec<BigInt> {
    match chart {
        0 => vec![BigInt::one(), x.clone(), y.clone()],
        1 => vec![p * x, BigInt::one(), y.clone()],
        _ => vec![p * x, p * y, BigInt::one()],
    }
}

/// Decides solvability over `Q_p` by a Hensel-certified search in the three charts.
/// Rejection means every residue class died before the depth bound
/// `2 v_p(disc) + 3`.
pub fn locally_solvable(c: &PlaneCubic, p: &BigInt) -> Result<LocalCertificate> {
    let pu = p
        .to_u64()
        .filter(|&q| arith::is_prime_u64(q))
        .ok_or_else(|| Error::InvalidInput(format!("{p} is not a word-sized prime")))?;
    let form = primitive_form(c)?;
    let depth_bound = 2 * disc_valuation(c, p)? + 3;
    let (status, hit, depth, nodes) = padic::search_charts(&charts(&form, p), p, depth_bound, NODE_CAP)?;
    let (chart, witness, hensel) = match hit {
        Some((i, w)) => (Some(i), Some(chart_point(i, &w.x, &w.y, p)), Some(w)),
        None => (None, None, None),
    };
    Ok(LocalCertificate {
        place: Place::Prime(pu),
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

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A real point: `(1 : 0 : 0)` if it lies on the curve, otherwise a root of the
/// odd-degree polynomial `F(w, 0, 1)`.
pub fn really_solvable(c: &PlaneCubic) -> LocalCertificate {
    let k = &c.coefficients;
    if k[0].is_zero() {
        return LocalCertificate::real(LocalStatus::Solvable, Some(vec![1.0, 0.0, 0.0]));
    }
    // w^3 + a w^2 + b w + e after dividing by the leading coefficient
    let (a, b, e) = (to_f64(&(&k[4] / &k[0])), to_f64(&(&k[7] / &k[0])), to_f64(&(&k[9] / &k[0])));
    let f = |w: f64| ((w + a) * w + b) * w + e;
    // Cauchy bound on the roots
    let r = 1.0 + a.abs().max(b.abs()).max(e.abs());
    let (mut lo, mut hi) = (-r, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    LocalCertificate::real(LocalStatus::Solvable, Some(vec![0.5 * (lo + hi), 0.0, 1.0]))
}

/// True iff the certificate re-verifies: a solvable prime certificate must pass
/// the Hensel test in its chart and match its projective witness; a real one must
/// nearly vanish; any other verdict is recomputed.
pub fn replay(c: &PlaneCubic, cert: &LocalCertificate) -> bool {
    match cert.place {
        Place::Real => match (&cert.status, &cert.real_witness) {
            (LocalStatus::Solvable, Some(pt)) if pt.len() == 3 => {
                let val: f64 = crate::threedescent::MONOMIALS
                    .iter()
                    .zip(&c.coefficients)
                    .map(|(&(i, j), co)| to_f64(co) * pt[0].powi(i as i32) * pt[1].powi(j as i32) * pt[2].powi((3 - i - j) as i32))
                    .sum();
                let scale: f64 = c.coefficients.iter().map(|x| to_f64(x).abs()).sum::<f64>()
                    * pt.iter().map(|x| x.abs()).fold(1.0, f64::max).powi(3);
                val.abs() <= 1e-9 * scale
            }
            _ => false,
        },
        Place::Prime(p) => {
            let p = BigInt::from(p);
            match (cert.status, cert.chart, &cert.hensel, &cert.witness) {
                (LocalStatus::Solvable, Some(i), Some(h), Some(w)) => {
                    let Ok(form) = primitive_form(c) else {
                        return false;
                    };
                    let cs = charts(&form, &p);
                    i < cs.len() && padic::hensel_certifies(&cs[i], h, &p) && *w == chart_point(i, &h.x, &h.y, &p)
                }
                (LocalStatus::Solvable, ..) => false,
                (status, ..) => matches!(locally_solvable(c, &p), Ok(again) if again.status == status),
            }
        }
    }
}

/// Certificates at the real place and at every bad or small prime. Any other
/// prime `p > 3` has good reduction, so the reduction has `p + 1 - 2 sqrt(p) > 0`
/// points over F_p, all smooth, and they lift.
#[derive(Debug, Clone, Serialize)]
pub struct LocalBundle {
    pub solvable: bool,
    pub bad_primes: Vec<u64>,
    pub certificates: Vec<LocalCertificate>,
}

pub fn everywhere_locally_solvable(c: &PlaneCubic) -> Result<LocalBundle> {
    let bad: Vec<BigInt> = bad_primes(c)?;
    let mut primes: Vec<BigInt> = bad.clone();
    primes.extend(arith::small_primes().iter().map(|&q| BigInt::from(q)).filter(|q| *q <= BigInt::from(SMALL_PRIME_BOUND)));
    primes.sort();
    primes.dedup();
    let mut certificates = vec![really_solvable(c)];
    let local: Vec<LocalCertificate> = primes.par_iter().map(|p| locally_solvable(c, p)).collect::<Result<_>>()?;
    certificates.extend(local);
    if let Some(cert) = certificates.iter().find(|c| c.status == LocalStatus::Inconclusive) {
        return Err(Error::Inconclusive(format!("local solvability at {:?} undecided", cert.place)));
    }
    Ok(LocalBundle {
        solvable: certificates.iter().all(|c| c.is_solvable()),
        bad_primes: bad.iter().map(|p| p.to_u64().expect("word-sized prime")).collect(),
        certificates,
    })
}

/// Rational points found by a bounded search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalSearchResult {
    pub height_bound: u64,
    /// primitive `(w : z : v)` with `|w|, |z|, |v| <= height_bound`, normalised so the
    /// last nonzero coordinate is positive, sorted
    #[serde(serialize_with = "ser_points")]
    pub projective_points: Vec<[BigInt; 3]>,
    /// the affine ones, `(w/v, z/v)`
    #[serde(serialize_with = "ser_affine")]
    pub points_found: Vec<(BigRational, BigRational)>,
}

fn ser_points<S: serde::Serializer>(pts: &[[BigInt; 3]], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

fn ser_affine<S: serde::Serializer>(
    pts: &[(BigRational, BigRational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(|(w, z)| [w.to_string(), z.to_string()]))
}

impl GlobalSearchResult {
    pub fn is_empty(&self) -> bool {
        self.projective_points.is_empty()
    }
}

/// Coefficients of `F(w, z, v)` as a cubic in `w`, lowest degree first.
fn w_slice<T>(k: &[T; 10], z: &T, v: &T) -> [T; 4]
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let (z2, v2, zv) = (z.clone() * z.clone(), v.clone() * v.clone(), z.clone() * v.clone());
    [
        k[3].clone() * z2.clone() * z.clone()
            + k[6].clone() * z2.clone() * v.clone()
            + k[8].clone() * z.clone() * v2.clone()
            + k[9].clone() * v2.clone() * v.clone(),
        k[2].clone() * z2 + k[5].clone() * zv + k[7].clone() * v2,
        k[1].clone() * z.clone() + k[4].clone() * v.clone(),
        k[0].clone(),
    ]
}

/// All primitive `(w : z : v)` on the cubic with every coordinate at most `h` in
/// absolute value. Each `(z, v)` line is solved exactly for integer `w`.
pub fn search_rational_points(c: &PlaneCubic, h: u64) -> Result<GlobalSearchResult> {
    let form = primitive_form(c)?;
    let k: Vec<BigInt> = crate::threedescent::MONOMIALS
        .iter()
        .map(|&(i, j)| form.get(&[i, j, 3 - i - j]).cloned().unwrap_or_default())
        .collect();
    let k: [BigInt; 10] = k.try_into().expect("ten coefficients");
    let hb = BigInt::from(h);
    let cmax = k.iter().map(|x| x.abs()).max().unwrap();
    // the i128 path must hold 10 cmax h^3 and the derivative discriminant 52 cmax^2 h^2
    let limit = BigInt::from(i128::MAX) / 4;
    let small = &cmax * 10 * hb.pow(3) < limit && &cmax * &cmax * 52 * hb.pow(2) < limit;
    let hi = h as i64;
    let found: Vec<[BigInt; 3]> = (0..=hi)
        .into_par_iter()
        .flat_map_iter(|v| {
            let zlo = if v == 0 { 0 } else { -hi };
            let k = &k;
            (zlo..=hi).flat_map(move |z| line_points(k, z, v, hi, small))
        })
        .collect();
    let mut pts = found;
    if k[0].is_zero() {
        pts.push([BigInt::one(), BigInt::zero(), BigInt::zero()]);
    }
    pts.sort();
    pts.dedup();
    let points_found = pts
        .iter()
        .filter(|p| !p[2].is_zero())
        .map(|p| {
            (
                BigRational::new(p[0].clone(), p[2].clone()),
                BigRational::new(p[1].clone(), p[2].clone()),
            )
        })
        .collect();
    Ok(GlobalSearchResult {
        height_bound: h,
        projective_points: pts,
        points_found,
    })
}

fn line_points(k: &[BigInt; 10], z: i64, v: i64, h: i64, small: bool) -> Vec<[BigInt; 3]> {
    if z == 0 && v == 0 {
        return Vec::new();
    }
    let ws: Vec<i64> = if small {
        let k: Vec<i128> = k.iter().map(|x| x.to_i128().unwrap()).collect();
        let k: [i128; 10] = k.try_into().unwrap();
        let s = w_slice(&k, &(z as i128), &(v as i128));
        arith::integer_roots_in_range(&s, &-(h as i128), &(h as i128))
            .into_iter()
            .map(|w| w as i64)
            .collect()
    } else {
        let s = w_slice(k, &BigInt::from(z), &BigInt::from(v));
        arith::integer_roots_in_range(&s, &BigInt::from(-h), &BigInt::from(h))
            .into_iter()
            .map(|w| w.to_i64().unwrap())
            .collect()
    };
    ws.into_iter()
        .filter(|&w| w.gcd(&z).gcd(&v) == 1)
        .map(|w| [BigInt::from(w), BigInt::from(z), BigInt::from(v)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn fermat() -> PlaneCubic {
        // w^3 + z^3 - 1
        PlaneCubic::from_ints([1, 0, 0, 1, 0, 0, 0, 0, 0, -1]).unwrap()
    }

    #[test]
    fn fermat_points_and_bad_primes() {
        let r = search_rational_points(&fermat(), 10).unwrap();
        assert_eq!(r.points_found, vec![(rat(0), rat(1)), (rat(1), rat(0))]);
        assert_eq!(r.projective_points.len(), 3); // plus (1 : -1 : 0)
        assert_eq!(bad_primes(&fermat()).unwrap(), vec![int(2), int(3)]);
        let cert = really_solvable(&fermat());
        assert!(replay(&fermat(), &cert));
    }

    #[test]
    fn selmer_cubic_is_everywhere_locally_solvable() {
        let c = PlaneCubic::from_ints([3, 0, 0, 4, 0, 0, 0, 0, 0, 5]).unwrap();
        let bundle = everywhere_locally_solvable(&c).unwrap();
        assert!(bundle.solvable);
        assert!(bundle.certificates.iter().all(|cert| replay(&c, cert)));
        assert!(search_rational_points(&c, 30).unwrap().is_empty());
    }

    #[test]
    fn norm_form_has_no_three_adic_point() {
        // w^3 + 3z^3 + 9: the three terms have distinct valuations mod 3
        let c = PlaneCubic::from_ints([1, 0, 0, 3, 0, 0, 0, 0, 0, 9]).unwrap();
        let cert = locally_solvable(&c, &int(3)).unwrap();
        assert_eq!(cert.status, LocalStatus::Unsolvable);
        assert!(cert.depth <= cert.depth_bound);
        let form = primitive_form(&c).unwrap();
        for f in charts(&form, &int(3)) {
            assert!(!padic::has_zero_mod_pk(&f, 3, 3));
        }
        assert!(!everywhere_locally_solvable(&c).unwrap().solvable);
        let cert = locally_solvable(&c, &int(2)).unwrap();
        assert!(cert.is_solvable() && replay(&c, &cert));
    }

    #[test]
    fn singular_is_an_error() {
        // cusp w^3 = z^2 v
        let c = PlaneCubic::from_ints([1, 0, 0, 0, 0, 0, -1, 0, 0, 0]).unwrap();
        assert!(everywhere_locally_solvable(&c).is_err());
        assert!(bad_primes(&c).is_err());
    }
}
