//! The family `E_h: y^2 = x^3 - 216 (x - h (h - 6)^2)^2`: the sieve for admissible
//! `h` and the end-to-end analysis producing a `DescentReport`.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, int, rat};
use crate::curves::{self, CurveRecord, IsogenyDescriptor, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::localred::{self, Kodaira, ReductionKind};
use crate::quadring::{self, QuadElem};
use crate::solvability::{self, GlobalSearchResult, LocalBundle};
use crate::threedescent::{self, BarModel, ClassValue, PlaneCubic, SelmerPsi};
use crate::twodescent::{self, Direction, SelmerPhiResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_HEIGHT: u64 = 1000;

/// The reason `h` fails the hypotheses, or `None` when it is admissible.
/// Literal mode asks for `h = 3 mod 8` and `|h|, |h-2|, |h-6|, |h-8|` prime;
/// strict mode also asks for `h = 19 mod 120`.
pub fn admissibility_failure(h: i64, strict: bool) -> Option<String> {
    if h.rem_euclid(8) != 3 {
        return Some(format!("h = {h} is not 3 mod 8"));
    }
    for k in [0i64, 2, 6, 8] {
        let n = (h as i128 - k as i128).unsigned_abs();
        if !(n <= u64::MAX as u128 && arith::is_prime_u64(n as u64)) {
            let what = if k == 0 { "|h|".to_string() } else { format!("|h-{k}|") };
            return Some(format!("{what} = {n} is not prime"));
        }
    }
    if strict && h.rem_euclid(120) != 19 {
        return Some(format!("h = {h} is not 19 mod 120"));
    }
    None
}

pub fn admissible(h: i64, strict: bool) -> bool {
    admissibility_failure(h, strict).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveQuery {
    pub lo: i64,
    pub hi: i64,
    pub strict_congruence: bool,
}

/// All admissible `h` in `[lo, hi]`, ascending. Strict mode walks the progression
/// `19 mod 120`, literal mode `3 mod 8`; the four primality tests run in parallel
/// over chunks of the progression.
pub fn sieve(q: &SieveQuery) -> Result<Vec<i64>> {
    if q.lo > q.hi {
        return Err(Error::InvalidInput(format!("empty range [{}, {}]", q.lo, q.hi)));
    }
    let (step, res) = if q.strict_congruence { (120i64, 19i64) } else { (8, 3) };
    let first = q.lo + (res - q.lo).rem_euclid(step);
    if first > q.hi {
        return Ok(Vec::new());
    }
    let count = (q.hi - first) / step + 1;
    Ok((0..count)
        .into_par_iter()
        .map(|i| first + i * step)
        .filter(|&h| admissible(h, q.strict_congruence))
        .collect())
}

/// `E_h` as `y^2 = x^3 + A (x - B)^2` with `A = -216`, `B = h (h - 6)^2`.
pub fn family_isogeny(h: i64) -> Result<IsogenyDescriptor> {
    let hb = int(h);
    let b = &hb * (&hb - 6) * (&hb - 6);
    IsogenyDescriptor::psi3_ab(&rat(-216), &BigRational::from(b))
}

/// `K = (h - 2)^2 (h - 8)`.
pub fn k_value(h: i64) -> BigInt {
    let hb = int(h);
    (&hb - 2) * (&hb - 2) * (&hb - 8)
}

/// The minimal model `y^2 = x^3 + 72 (x - K/3)^2` of the 3-isogenous curve.
pub fn bar_minimal(h: i64) -> BarModel {
    BarModel::Ab {
        abar: rat(72),
        bbar: BigRational::new(k_value(h), int(3)),
    }
}

/// The cubics attached to `t = 1 + sqrt 2` and `t = -1 + sqrt 2`.
pub fn distinguished_cubics(h: i64) -> Result<(PlaneCubic, PlaneCubic)> {
    let bar = bar_minimal(h);
    let eps = quadring::fundamental_unit(&int(2))?;
    let plus = threedescent::homogeneous_space(&ClassValue::Quadratic(eps.clone()), &bar)?;
    let minus = threedescent::homogeneous_space(&ClassValue::Quadratic(eps.inv()?), &bar)?;
    Ok((plus, minus))
}

/// The cubic `w^3 + 18w^2z + 216wz^2 + 432z^3 + 2K = +-(432z^2 - 6w^2)` exactly as
/// displayed with the sign taken literally.
pub fn printed_cubic(h: i64, sign: i64) -> Result<PlaneCubic> {
    let two_k = BigRational::from(k_value(h) * 2);
    let s = rat(sign.signum());
    // moving the right-hand side over gives +-6 w^2 and -+432 z^2
    let c = vec![rat(1), rat(18), rat(216), rat(432), &s * rat(6), rat(0), -&s * rat(432), rat(0), rat(0), two_k];
    PlaneCubic::new(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveEntry {
    pub name: &'static str,
    pub model: CurveRecord,
    pub minimal_model: CurveRecord,
    #[serde(with = "arith::serde_str::int")]
    pub minimal_discriminant: BigInt,
    pub tamagawa_product: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionCell {
    pub kind: ReductionKind,
    pub kodaira: Kodaira,
    pub c_p: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionRow {
    /// `2`, `3`, `h-8`, `h-6`, `h-2` or `h`
    pub label: String,
    pub p: u64,
    pub e: ReductionCell,
    pub e_prime: ReductionCell,
    pub e_bar: ReductionCell,
}

#[derive(Debug, Clone, Serialize)]
pub struct CubicEntry {
    pub class: String,
    pub cubic: PlaneCubic,
    pub canonical: String,
    pub smooth: bool,
    pub local: LocalBundle,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishedCubic {
    pub sign: char,
    pub cubic: PlaneCubic,
    pub canonical: String,
    pub local: LocalBundle,
    pub search: GlobalSearchResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `C_+-` are nontrivial in Sha: points everywhere locally, none globally
    HasseViolation,
    /// one of `C_+-` has no point over some completion, so it is not a counterexample
    NoViolation,
    /// the pipeline could not decide
    NotCertified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::HasseViolation => "HASSE_VIOLATION",
            Verdict::NoViolation => "NO_VIOLATION",
            Verdict::NotCertified => "NOT_CERTIFIED",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentReport {
    pub schema: u32,
    pub code_version: &'static str,
    pub h: i64,
    pub strict_congruence: bool,
    pub curves: Vec<CurveEntry>,
    pub discriminant_factorization: Vec<(String, u32)>,
    pub reduction_table: Vec<ReductionRow>,
    pub selmer_phi: SelmerPhiResult,
    pub selmer_phi_dual: SelmerPhiResult,
    pub rank: u32,
    pub selmer_psi: SelmerPsi,
    pub cubics: Vec<CubicEntry>,
    /// nontrivial Selmer classes; with `sha_flag` each cubic is a Hasse-principle violation
    pub sha_classes: Vec<String>,
    pub distinguished: Vec<DistinguishedCubic>,
    pub height_bound: u64,
    pub hasse_violation: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub height: u64,
    pub strict_congruence: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            height: DEFAULT_HEIGHT,
            strict_congruence: true,
        }
    }
}

fn curve_entry(name: &'static str, e: &WeierstrassCurve) -> Result<CurveEntry> {
    let min = localred::global_minimal_model(e)?;
    Ok(CurveEntry {
        name,
        model: e.to_record(),
        minimal_discriminant: curves::integral_discriminant(&min)?,
        minimal_model: min.to_record(),
        tamagawa_product: localred::tamagawa_product(e)?,
    })
}

fn cell(e: &WeierstrassCurve, p: &BigInt) -> Result<ReductionCell> {
    let d = localred::tate_algorithm(&localred::global_minimal_model(e)?, p)?;
    Ok(ReductionCell {
        kind: d.kind,
        kodaira: d.kodaira,
        c_p: d.tamagawa,
    })
}

/// Reduction types and Tamagawa numbers at `2, 3, h-8, h-6, h-2, h`.
pub fn reduction_table(h: i64, e: &WeierstrassCurve, ep: &WeierstrassCurve, ebar: &WeierstrassCurve) -> Result<Vec<ReductionRow>> {
    let rows = [
        ("2".to_string(), 2i64),
        ("3".to_string(), 3),
        ("h-8".to_string(), h - 8),
        ("h-6".to_string(), h - 6),
        ("h-2".to_string(), h - 2),
        ("h".to_string(), h),
    ];
    rows.into_iter()
        .map(|(label, n)| {
            let p = int(n.abs());
            Ok(ReductionRow {
                label,
                p: n.unsigned_abs(),
                e: cell(e, &p)?,
                e_prime: cell(ep, &p)?,
                e_bar: cell(ebar, &p)?,
            })
        })
        .collect()
}

/// The curves `E_h`, `E_h'` (2-isogenous) and `Ebar_h` (3-isogenous), and the
/// two-torsion model of `E_h` the 2-descent runs on.
pub struct FamilyCurves {
    pub psi: IsogenyDescriptor,
    pub two_torsion: WeierstrassCurve,
    pub e_prime: WeierstrassCurve,
}

pub fn family_curves(h: i64) -> Result<FamilyCurves> {
    let psi = family_isogeny(h)?;
    let (two_torsion, _) = curves::shift_two_torsion(&psi.domain)?;
    let c = two_torsion.coeffs();
    let e_prime = curves::phi_codomain(&c[1], &c[3])?;
    Ok(FamilyCurves {
        psi,
        two_torsion,
        e_prime,
    })
}

fn canonical_text(c: &PlaneCubic) -> String {
    c.canonicalize().render()
}

/// The full pipeline for one `h`. Errors carry the stage that failed.
pub fn analyze(h: i64, opts: &AnalyzeOptions) -> Result<DescentReport> {
    if let Some(why) = admissibility_failure(h, opts.strict_congruence) {
        return Err(Error::InvalidInput(why).at("admissibility"));
    }
    let fc = family_curves(h).map_err(|e| e.at("models"))?;
    let (e, ebar) = (&fc.psi.domain, &fc.psi.codomain);
    let curves_out = vec![
        curve_entry("E", e).map_err(|x| x.at("models"))?,
        curve_entry("E'", &fc.e_prime).map_err(|x| x.at("models"))?,
        curve_entry("Ebar", ebar).map_err(|x| x.at("models"))?,
    ];
    let disc_fact = arith::factor(&curves_out[0].minimal_discriminant)
        .into_iter()
        .map(|(p, k)| (p.to_string(), k))
        .collect();
    let table = reduction_table(h, e, &fc.e_prime, ebar).map_err(|x| x.at("reduction"))?;

    let (fwd, dual) = rayon::join(
        || twodescent::selmer_phi(&fc.two_torsion, Direction::Forward),
        || twodescent::selmer_phi(&fc.two_torsion, Direction::Dual),
    );
    let fwd = fwd.map_err(|x| x.at("two_descent"))?;
    let dual = dual.map_err(|x| x.at("two_descent"))?;
    let rank = twodescent::rank_upper_bound(fwd.order(), dual.order()).map_err(|x| x.at("rank"))?;

    let bounds = threedescent::selmer_psi_bounds(&fc.psi).map_err(|x| x.at("three_descent"))?;
    let bar = bar_minimal(h);
    let elements = bounds.classes.elements().map_err(|x| x.at("cubics"))?;
    let cubics: Vec<CubicEntry> = elements
        .par_iter()
        .map(|t: &QuadElem| {
            let c = threedescent::homogeneous_space(&ClassValue::Quadratic(t.clone()), &bar).map_err(|x| x.at("cubics"))?;
            let local = solvability::everywhere_locally_solvable(&c).map_err(|x| x.at("local_solvability"))?;
            Ok(CubicEntry {
                class: t.to_string(),
                canonical: canonical_text(&c),
                smooth: c.is_smooth(),
                cubic: c,
                local,
            })
        })
        .collect::<Result<_>>()?;
    let members = cubics.iter().map(|c| c.local.solvable).collect();
    let psi = threedescent::selmer_psi_from_members(&fc.psi, rank, members).map_err(|x| x.at("three_descent"))?;

    let (plus, minus) = distinguished_cubics(h).map_err(|x| x.at("cubics"))?;

    let distinguished: Vec<DistinguishedCubic> = [('+', plus), ('-', minus)]
        .into_par_iter()
        .map(|(sign, c)| {
            let local = solvability::everywhere_locally_solvable(&c).map_err(|x| x.at("local_solvability"))?;
            let search = solvability::search_rational_points(&c, opts.height).map_err(|x| x.at("global_search"))?;
            Ok(DistinguishedCubic {
                sign,
                canonical: canonical_text(&c),
                cubic: c,
                local,
                search,
            })
        })
        .collect::<Result<_>>()?;

    // the classes of 1 +- sqrt 2 are not cubes, so a point everywhere locally makes
    // them nontrivial elements of Sha[psi]
    let sha_classes = if psi.sha_flag {
        cubics.iter().skip(1).filter(|c| c.local.solvable).map(|c| c.class.clone()).collect()
    } else {
        Vec::new()
    };
    let hasse_violation = rank == 0
        && psi.sha_flag
        && cubics.iter().all(|c| c.smooth)
        && distinguished.iter().all(|d| d.local.solvable && d.search.is_empty());
    let verdict = if hasse_violation {
        Verdict::HasseViolation
    } else if distinguished.iter().any(|d| !d.local.solvable) {
        Verdict::NoViolation
    } else {
        Verdict::NotCertified
    };
    Ok(DescentReport {
        schema: SCHEMA_VERSION,
        code_version: CODE_VERSION,
        h,
        strict_congruence: opts.strict_congruence,
        curves: curves_out,
        discriminant_factorization: disc_fact,
        reduction_table: table,
        selmer_phi: fwd,
        selmer_phi_dual: dual,
        rank,
        selmer_psi: psi,
        cubics,
        sha_classes,
        distinguished,
        height_bound: opts.height,
        hasse_violation,
        verdict,
    })
}

impl DescentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn tamagawa_products(&self) -> [u64; 3] {
        [0, 1, 2].map(|i| self.curves[i].tamagawa_product)
    }

    /// Plain-text summary.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let mut line = |x: String| {
            s.push_str(&x);
            s.push('\n');
        };
        line(format!("h: {}", self.h));
        for c in &self.curves {
            line(format!(
                "{}: minimal model {:?}, prod c_p = {}",
                c.name,
                c.minimal_model.a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                c.tamagawa_product
            ));
        }
        line("reduction (p: E | E' | Ebar):".into());
        for r in &self.reduction_table {
            line(format!(
                "  {:>4} = {:<7} {} {} | {} {} | {} {}",
                r.label, r.p, r.e.kind, r.e.kodaira, r.e_prime.kind, r.e_prime.kodaira, r.e_bar.kind, r.e_bar.kodaira
            ));
        }
        let sel = |r: &SelmerPhiResult| r.selmer.iter().map(|c| c.representative().to_string()).collect::<Vec<_>>().join(", ");
        line(format!("Sel^(phi): {{{}}}", sel(&self.selmer_phi)));
        line(format!("Sel^(phi-hat): {{{}}}", sel(&self.selmer_phi_dual)));
        line(format!("rank: {}", self.rank));
        line(format!("Cassels ratio: {}", self.selmer_psi.cassels.selmer_ratio));
        line(format!(
            "L(S,3)* generators: {}",
            self.selmer_psi.classes.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
        ));
        line(format!(
            "Selmer bounds: {} <= #Sel^(psi) <= {}",
            self.selmer_psi.lower_bound, self.selmer_psi.upper_bound
        ));
        line(format!("Sel^(psi) order: {}", self.selmer_psi.order));
        line(format!("Sel^(psi-hat) order: {}", self.selmer_psi.dual_order));
        line(format!("sha_flag: {}", self.selmer_psi.sha_flag));
        line(format!("Sel^(psi) = Sha[3]: {}", self.selmer_psi.sha3_flag));
        line(format!("nontrivial Sha[psi] classes: [{}]", self.sha_classes.join(", ")));
        for d in &self.distinguished {
            line(format!("C{}: {}", d.sign, d.canonical));
            line(format!(
                "  everywhere locally solvable: {} (bad primes {:?})",
                d.local.solvable, d.local.bad_primes
            ));
            line(format!(
                "  rational points with height <= {}: {}",
                d.search.height_bound,
                d.search.projective_points.len()
            ));
        }
        line(format!("verdict: {}", self.verdict));
        s
    }
}

/// `<dir>/h_<h>.json`
pub fn report_path(dir: &Path, h: i64) -> PathBuf {
    dir.join(format!("h_{h}.json"))
}

/// Writes the report unless an identical file is already present.
pub fn store_report(dir: &Path, report: &DescentReport) -> Result<PathBuf> {
    let path = report_path(dir, report.h);
    let text = report.to_json();
    if fs::read_to_string(&path).is_ok_and(|old| old == text) {
        return Ok(path);
    }
    fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, &text).map_err(|e| Error::Io(e.to_string()))?;
    fs::rename(&tmp, &path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(path)
}

/// A stored report for `h`, if one was written by this code version with these options.
pub fn cached_report(dir: &Path, h: i64, opts: &AnalyzeOptions) -> Option<String> {
    let text = fs::read_to_string(report_path(dir, h)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    let ok = v["schema"] == SCHEMA_VERSION
        && v["code_version"] == CODE_VERSION
        && v["height_bound"] == opts.height
        && v["strict_congruence"] == opts.strict_congruence;
    ok.then_some(text)
}

/// Coefficients of the cubic as integers, for display and comparison.
pub fn integer_coefficients(c: &PlaneCubic) -> Vec<BigInt> {
    c.coefficients
        .iter()
        .map(|x| {
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}
