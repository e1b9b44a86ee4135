//! Lines and points on the base locus X = {Q1 = Q2 = 0} of a rational pencil
//! in dimension 6: hypothesis checks, local line tests at primes and at the
//! real place, a height-ordered point search and a combined report.

pub mod padic;
pub mod points;
pub mod real;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{factor_bigint, is_perfect_square, primes_up_to};
use crate::error::{Error, Result};
use crate::field::{rational_to_string, Rationals};
use crate::linalg::{self, Matrix};
use crate::pencil::Pencil;
use crate::poly::{PolyRing, P};
use crate::quadform::{local::Place, signature_r, Signature};

pub use padic::{LineCertificate, LocalSearch};
pub use points::PointSearch;
pub use real::RealWitness;

/// Primitive integer Gram matrices proportional to a rational pencil.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralModel {
    pub n: usize,
    pub q1: Matrix<BigInt>,
    pub q2: Matrix<BigInt>,
    /// The rational c with (q1, q2) = c (Q1, Q2).
    pub scale: BigRational,
}

impl IntegralModel {
    pub fn new(p: &Pencil<Rationals>) -> Self {
        let entries = p.q1().to_rows().into_iter().chain(p.q2().to_rows()).flatten();
        let lcm = entries.clone().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = entries.map(|x| (x * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let scale = BigRational::new(lcm.clone(), g.clone());
        let conv = |m: &Matrix<BigRational>| m.map(|x| (x * &scale).to_integer());
        Self { n: p.n(), q1: conv(p.q1()), q2: conv(p.q2()), scale }
    }

    pub fn forms(&self) -> [&Matrix<BigInt>; 2] {
        [&self.q1, &self.q2]
    }

    /// The same forms as a rational pencil.
    pub fn pencil(&self) -> Result<Pencil<Rationals>> {
        let conv = |m: &Matrix<BigInt>| m.map(|x| BigRational::from_integer(x.clone()));
        Pencil::new(Rationals, self.n, conv(&self.q1), conv(&self.q2))
    }
}

/// The discriminant of a polynomial, (-1)^(d(d-1)/2) Res(f, f') / lc(f).
pub fn poly_discriminant(f: &P<Rationals>) -> BigRational {
    let r = PolyRing::new(&Rationals);
    let d = f.degree().unwrap_or(0);
    if d == 0 {
        return BigRational::one();
    }
    let df = r.derivative(f);
    let (a, b) = (f.coeffs(), df.coeffs());
    let (m, n) = (d, d - 1);
    // Sylvester matrix of f (degree m) and f' (degree n)
    let size = m + n;
    let syl = Matrix::from_fn(size, size, |i, j| {
        if i < n {
            j.checked_sub(i).filter(|&k| k <= m).map_or(BigRational::zero(), |k| a[m - k].clone())
        } else {
            let i = i - n;
            j.checked_sub(i).filter(|&k| k <= n).map_or(BigRational::zero(), |k| b.get(n - k).cloned().unwrap_or_default())
        }
    });
    let res = linalg::det(&Rationals, &syl);
    let sign = if (d * (d - 1) / 2) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    sign * res / f.lc().unwrap()
}

fn is_rational_square(x: &BigRational) -> bool {
    !x.is_negative() && is_perfect_square(x.numer()) && is_perfect_square(x.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypotheses {
    /// disc(Q1) = (-1)^(n+1) det(Q1), the leading coefficient of f.
    pub disc_q1: BigRational,
    pub disc_q1_is_square: bool,
    pub f: P<Rationals>,
    /// f squarefree of full degree.
    pub smooth: bool,
}

impl Hypotheses {
    pub fn to_json(&self) -> Value {
        json!({
            "disc_q1": rational_to_string(&self.disc_q1),
            "disc_q1_is_square": self.disc_q1_is_square,
            "f": PolyRing::new(&Rationals).to_json(&self.f),
            "smooth": self.smooth,
        })
    }
}

pub fn check_hypotheses(p: &Pencil<Rationals>) -> Result<Hypotheses> {
    if p.dim() != 6 {
        return Err(Error::InvalidInput(format!("the analysis is for pencils in dimension 6, got {}", p.dim())));
    }
    let f = p.disc_poly();
    let disc_q1 = f.lc().cloned().unwrap_or_default();
    let smooth = f.degree() == Some(6) && PolyRing::new(&Rationals).is_squarefree(&f)?;
    Ok(Hypotheses { disc_q1_is_square: is_rational_square(&disc_q1), disc_q1, f, smooth })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LineFound,
    NoLine,
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::LineFound => "line-found",
            Verdict::NoLine => "no-line",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    Line { certificate: LineCertificate, reverified: bool },
    /// The reduction has no isotropic plane, so neither does any Z_p model.
    NoLineModP,
    RealObstruction(RealWitness),
    /// Every sampled member has min(pos, neg) >= n.
    NecessaryConditionPassed(Vec<(BigRational, Signature)>),
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceVerdict {
    pub place: Place,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

fn signature_json(s: &Signature) -> Value {
    json!({ "positive": s.positive, "negative": s.negative, "zero": s.zero })
}

impl PlaceVerdict {
    pub fn necessary_condition_passed(&self) -> bool {
        matches!(self.evidence, Evidence::NecessaryConditionPassed(_))
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "place": self.place.to_string(), "verdict": self.verdict.as_str() });
        match &self.evidence {
            Evidence::Line { certificate, reverified } => {
                v["certificate"] = serde_json::to_value(certificate).expect("plain data");
                v["reverified"] = json!(reverified);
            }
            Evidence::NoLineModP => v["witness"] = json!("no isotropic plane modulo p"),
            Evidence::RealObstruction(w) => {
                v["witness"] = json!({
                    "t": rational_to_string(&w.t),
                    "signature": signature_json(&w.signature),
                    "definite": w.is_definite(),
                })
            }
            Evidence::NecessaryConditionPassed(samples) => {
                v["flag"] = json!("necessary-condition-passed");
                v["samples"] = samples
                    .iter()
                    .map(|(t, s)| json!({ "t": rational_to_string(t), "signature": signature_json(s) }))
                    .collect();
            }
            Evidence::Note(s) => v["note"] = json!(s),
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub prime_bound: u64,
    pub height_bound: u32,
    /// Search and lifting nodes allowed per prime.
    pub node_budget: i64,
    /// Hard ceiling on the p-adic precision of certificates.
    pub max_precision: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { prime_bound: 13, height_bound: 10, node_budget: 20_000_000, max_precision: 16 }
    }
}

pub fn local_line_test(model: &IntegralModel, p: u64, cfg: &AnalysisConfig) -> PlaceVerdict {
    let place = Place::Prime(p);
    match padic::search_line(model.forms(), model.n, p, cfg.max_precision, cfg.node_budget) {
        LocalSearch::Line(certificate) => {
            let reverified = padic::verify_certificate(model.forms(), &certificate);
            PlaceVerdict { place, verdict: Verdict::LineFound, evidence: Evidence::Line { certificate, reverified } }
        }
        LocalSearch::NoLineModP => PlaceVerdict { place, verdict: Verdict::NoLine, evidence: Evidence::NoLineModP },
        LocalSearch::Inconclusive(why) => PlaceVerdict { place, verdict: Verdict::Unknown, evidence: Evidence::Note(why) },
    }
}

pub fn real_line_test(p: &Pencil<Rationals>) -> Result<PlaceVerdict> {
    let (samples, witness) = real::signature_obstruction(p)?;
    Ok(match witness {
        Some(w) => PlaceVerdict { place: Place::Real, verdict: Verdict::NoLine, evidence: Evidence::RealObstruction(w) },
        None => PlaceVerdict {
            place: Place::Real,
            verdict: Verdict::Unknown,
            evidence: Evidence::NecessaryConditionPassed(samples),
        },
    })
}

pub fn point_search(p: &Pencil<Rationals>, height_bound: u32) -> Result<PointSearch> {
    let model = IntegralModel::new(p);
    let definite = signature_r(p.q1())?.is_definite() || signature_r(p.q2())?.is_definite();
    Ok(points::point_search(model.forms(), definite, height_bound))
}

/// Primes dividing 2 det(Q1) disc(f) for the integral model, plus any
/// cofactor that trial division could not split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadPrimes {
    pub primes: Vec<u64>,
    pub unfactored: Option<BigInt>,
}

pub fn bad_primes(model: &IntegralModel) -> Result<BadPrimes> {
    let p = model.pencil()?;
    let det = linalg::det(&Rationals, p.q1()).to_integer();
    let disc = poly_discriminant(&p.disc_poly());
    let product = BigInt::from(2) * det * disc.numer() * disc.denom();
    if product.is_zero() {
        return Err(Error::SingularPencil);
    }
    let fac = factor_bigint(&product);
    let unfactored = (!fac.is_complete()).then(|| BigInt::from(fac.cofactor.clone()));
    Ok(BadPrimes { primes: fac.primes.iter().map(|&(p, _)| p).collect(), unfactored })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub hypotheses: Hypotheses,
    /// Set when the pencil is singular and the analysis stopped.
    pub aborted: bool,
    pub config: AnalysisConfig,
    pub integral_scale: Option<BigRational>,
    pub bad_primes: Option<BadPrimes>,
    pub places: Vec<PlaceVerdict>,
    pub points: Option<PointSearch>,
    /// Primes p <= B at which the found point was checked to reduce to a
    /// zero of both forms.
    pub point_reductions: Vec<(u64, bool)>,
    pub consistent: bool,
}

impl AnalysisReport {
    pub fn obstruction_found(&self) -> bool {
        self.places.iter().any(|v| v.verdict == Verdict::NoLine)
    }

    /// Unknown finite places, or bad primes that were not determined.
    pub fn unknowns_remain(&self) -> bool {
        self.places.iter().any(|v| v.verdict == Verdict::Unknown && !v.necessary_condition_passed())
            || self.bad_primes.as_ref().is_some_and(|b| b.unfactored.is_some())
    }

    /// 1 inconsistent, 4 singular pencil, 2 obstruction, 4 disc(Q1) not a
    /// square, 3 unknowns, otherwise 0.
    pub fn exit_code(&self) -> i32 {
        if !self.consistent {
            1
        } else if self.aborted {
            4
        } else if self.obstruction_found() {
            2
        } else if !self.hypotheses.disc_q1_is_square {
            4
        } else if self.unknowns_remain() {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": 1,
            "hypotheses": self.hypotheses.to_json(),
            "aborted": self.aborted,
            "prime_bound": self.config.prime_bound,
            "height_bound": self.config.height_bound,
            "consistent": self.consistent,
            "exit_code": self.exit_code(),
        });
        if self.aborted {
            return v;
        }
        if let Some(s) = &self.integral_scale {
            v["integral_scale"] = json!(rational_to_string(s));
        }
        if let Some(b) = &self.bad_primes {
            v["bad_primes"] = json!(b.primes);
            v["unfactored"] = json!(b.unfactored.as_ref().map(|c| c.to_string()));
        }
        v["places"] = self.places.iter().map(PlaceVerdict::to_json).collect();
        v["unchecked_places"] = json!(format!("good primes above {}: assumed, not verified", self.config.prime_bound));
        if let Some(ps) = &self.points {
            v["point_search"] = json!({
                "height_bound": ps.height_bound,
                "point": ps.point.as_ref().map(|x| x.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                "height": ps.height,
                "definite_form": ps.definite_form,
                "reductions_checked": self.point_reductions.iter().map(|&(p, _)| p).collect::<Vec<_>>(),
            });
        }
        v
    }
}

/// Runs every test and assembles the report. Places are tested in parallel;
/// the report does not depend on scheduling.
pub fn analyze(p: &Pencil<Rationals>, cfg: &AnalysisConfig) -> Result<AnalysisReport> {
    if cfg.prime_bound == 0 || cfg.height_bound == 0 || cfg.node_budget <= 0 || cfg.max_precision == 0 {
        return Err(Error::InvalidInput("bounds must be positive".into()));
    }
    let hypotheses = check_hypotheses(p)?;
    if !hypotheses.smooth {
        return Ok(AnalysisReport {
            hypotheses,
            aborted: true,
            config: *cfg,
            integral_scale: None,
            bad_primes: None,
            places: Vec::new(),
            points: None,
            point_reductions: Vec::new(),
            consistent: true,
        });
    }
    let model = IntegralModel::new(p);
    let bad = bad_primes(&model)?;
    let mut primes = primes_up_to(cfg.prime_bound);
    primes.extend(&bad.primes);
    primes.sort_unstable();
    primes.dedup();
    let mut places = vec![real_line_test(p)?];
    places.extend(primes.par_iter().map(|&q| local_line_test(&model, q, cfg)).collect::<Vec<_>>());
    let points = point_search(p, cfg.height_bound)?;

    let mut consistent = places
        .iter()
        .all(|v| !matches!(v.evidence, Evidence::Line { reverified: false, .. }));
    let mut point_reductions = Vec::new();
    if let Some(x) = &points.point {
        let real_points_excluded = places
            .iter()
            .any(|v| matches!(&v.evidence, Evidence::RealObstruction(w) if w.is_definite()));
        consistent &= !real_points_excluded;
        for q in primes_up_to(cfg.prime_bound) {
            let ok = reduces_to_zero(&model, x, q);
            consistent &= ok;
            point_reductions.push((q, ok));
        }
    }
    Ok(AnalysisReport {
        hypotheses,
        aborted: false,
        config: *cfg,
        integral_scale: Some(model.scale.clone()),
        bad_primes: Some(bad),
        places,
        points: Some(points),
        point_reductions,
        consistent,
    })
}

/// Whether x mod q is a nonzero common zero of the reduced forms.
fn reduces_to_zero(model: &IntegralModel, x: &[BigInt], q: u64) -> bool {
    let qq = BigInt::from(q);
    let r: Vec<BigInt> = x.iter().map(|c| c.mod_floor(&qq)).collect();
    if r.iter().all(Zero::is_zero) {
        return false;
    }
    model.forms().iter().all(|m| {
        let mut s = BigInt::zero();
        for i in 0..r.len() {
            for j in 0..r.len() {
                s += m.get(i, j) * &r[i] * &r[j];
            }
        }
        (s % &qq).is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arulwang;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn aw(f: &[i64]) -> Pencil<Rationals> {
        arulwang::build(&Rationals, &PolyRing::new(&Rationals).from_i64s(f)).unwrap().pencil
    }

    #[test]
    fn discriminant_of_small_polynomials() {
        let r = PolyRing::new(&Rationals);
        // t^2 + b t + c: b^2 - 4c
        assert_eq!(poly_discriminant(&r.from_i64s(&[3, 5, 1])), q(13));
        // t^3 + a t + b: -4a^3 - 27b^2
        assert_eq!(poly_discriminant(&r.from_i64s(&[2, -1, 0, 1])), q(4 - 108));
        // t^6 - 1: (-1)^15 6^6 (-1)^5
        assert_eq!(poly_discriminant(&r.from_i64s(&[-1, 0, 0, 0, 0, 0, 1])), q(46656));
    }

    #[test]
    fn hypotheses_follow_the_sign_convention() {
        let h = check_hypotheses(&aw(&[-1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert!(h.disc_q1_is_square && h.smooth);
        assert_eq!(h.disc_q1, q(1));
        let k = Rationals;
        let id = Pencil::new(k, 2, linalg::identity(&k, 6), linalg::diagonal(&k, &(1..=6).map(q).collect::<Vec<_>>())).unwrap();
        let h = check_hypotheses(&id).unwrap();
        // (-1)^3 det(I) = -1
        assert_eq!(h.disc_q1, q(-1));
        assert!(!h.disc_q1_is_square);
        assert!(h.smooth);
        let rep = Pencil::new(k, 2, linalg::identity(&k, 6), linalg::diagonal(&k, &[1, 1, 2, 3, 4, 5].map(q))).unwrap();
        assert!(!check_hypotheses(&rep).unwrap().smooth);
        let report = analyze(&rep, &AnalysisConfig::default()).unwrap();
        assert!(report.aborted);
        assert_eq!(report.exit_code(), 4);
    }

    #[test]
    fn integral_model_clears_denominators() {
        let k = Rationals;
        let half = BigRational::new(1.into(), 2.into());
        let q1 = linalg::scale(&k, &linalg::identity(&k, 6), &half);
        let q2 = linalg::diagonal(&k, &[q(2), q(4), q(6), q(8), q(10), q(12)]);
        let m = IntegralModel::new(&Pencil::new(k, 2, q1, q2).unwrap());
        assert_eq!(m.scale, q(2));
        assert_eq!(*m.q1.get(0, 0), BigInt::from(1));
        assert_eq!(*m.q2.get(5, 5), BigInt::from(24));
    }

    #[test]
    fn standard_pencil_analysis() {
        let cfg = AnalysisConfig { prime_bound: 7, height_bound: 2, ..Default::default() };
        let r = analyze(&aw(&[-1, 0, 0, 0, 0, 0, 1]), &cfg).unwrap();
        assert_eq!(r.bad_primes.as_ref().unwrap().primes, vec![2, 3]);
        assert!(r.consistent);
        for v in &r.places {
            assert!(v.verdict == Verdict::LineFound || v.necessary_condition_passed(), "{v:?}");
        }
        assert_eq!(r.points.as_ref().unwrap().height, Some(1));
        assert_eq!(r.exit_code(), 0);
        let json = r.to_json();
        assert_eq!(json["schema"], 1);
        // larger bounds keep every positive verdict
        let bigger = analyze(&aw(&[-1, 0, 0, 0, 0, 0, 1]), &AnalysisConfig { prime_bound: 11, height_bound: 3, ..cfg }).unwrap();
        for v in &r.places {
            let w = bigger.places.iter().find(|w| w.place == v.place).unwrap();
            assert_eq!(w.verdict, v.verdict);
        }
        assert_eq!(bigger.points.unwrap().point, r.points.unwrap().point);
    }

    #[test]
    fn definite_pencil_is_obstructed_at_the_real_place() {
        let k = Rationals;
        let p = Pencil::new(k, 2, linalg::identity(&k, 6), linalg::diagonal(&k, &(1..=6).map(q).collect::<Vec<_>>())).unwrap();
        let r = analyze(&p, &AnalysisConfig { prime_bound: 5, height_bound: 3, ..Default::default() }).unwrap();
        assert_eq!(r.places[0].place, Place::Real);
        assert_eq!(r.places[0].verdict, Verdict::NoLine);
        assert!(r.points.as_ref().unwrap().point.is_none());
        assert!(r.consistent);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn transformed_standard_pencil_has_a_point() {
        let k = Rationals;
        let p = aw(&[-1, 0, 0, 0, 0, 0, 1]);
        let m = linalg::from_i64(&k, &[
            vec![1, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 1],
            vec![0, 0, 1, 0, 0, 0],
            vec![0, 0, 1, 1, 0, 0],
            vec![0, 0, 0, 0, 1, 0],
            vec![1, 0, 0, 0, -1, 1],
        ]);
        let t = p.transform(&m).unwrap();
        let ps = point_search(&t, 3).unwrap();
        let x: Vec<BigRational> = ps.point.unwrap().into_iter().map(BigRational::from_integer).collect();
        for g in [t.q1(), t.q2()] {
            assert!(linalg::bilinear(&k, g, &x, &x).is_zero());
        }
    }

    /// Common isotropic planes mod p by pairing up isotropic vectors.
    fn brute_plane_exists(q1: &[i64], q2: &[i64], p: i64) -> bool {
        let form = |g: &[i64], x: &[i64], y: &[i64]| (0..6).map(|i| g[i] * x[i] * y[i]).sum::<i64>().rem_euclid(p);
        let vecs: Vec<Vec<i64>> = (1..p.pow(6))
            .map(|i| (0..6).map(|k| i / p.pow(k) % p).collect::<Vec<i64>>())
            .filter(|x| form(q1, x, x) == 0 && form(q2, x, x) == 0)
            .collect();
        vecs.iter().any(|x| {
            vecs.iter().any(|y| {
                let independent = (0..6).any(|i| (0..6).any(|j| (x[i] * y[j] - x[j] * y[i]).rem_euclid(p) != 0));
                independent && form(q1, x, y) == 0 && form(q2, x, y) == 0
            })
        })
    }

    #[test]
    fn no_plane_modulo_three() {
        // mod 3, Q1 is anisotropic on the first two coordinates and Q2 has
        // Witt index 1 on the other four
        let (a, b) = ([1, 1, 3, 6, -3, 12], [1, 2, 1, -1, 1, 1]);
        assert!(!brute_plane_exists(&a, &b, 3));
        let k = Rationals;
        let p = Pencil::new(k, 2, linalg::diagonal(&k, &a.map(q)), linalg::diagonal(&k, &b.map(q))).unwrap();
        assert!(check_hypotheses(&p).unwrap().smooth);
        let model = IntegralModel::new(&p);
        let v = local_line_test(&model, 3, &AnalysisConfig::default());
        assert_eq!(v.verdict, Verdict::NoLine);
        assert_eq!(v.evidence, Evidence::NoLineModP);
        // the same oracle agrees with the search at another prime
        let v5 = local_line_test(&model, 5, &AnalysisConfig::default());
        assert_eq!(v5.verdict == Verdict::NoLine, !brute_plane_exists(&a, &b, 5));
    }
}
