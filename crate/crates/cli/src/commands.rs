use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context};
use pencilkit::field::{Field, FieldDescriptor, FiniteField, PrimeField, Rationals};
use pencilkit::galoistwist::{cocycle_from_two_torsion, twist_pencil};
use pencilkit::hyperell::HyperellipticCurve;
use pencilkit::io::{self, AnyPencil};
use pencilkit::isotropic;
use pencilkit::linalg::{self, Mat};
use pencilkit::localglobal::{self, AnalysisConfig};
use pencilkit::pencil::aut::theta;
use pencilkit::pencil::Pencil;
use pencilkit::poly::PolyRing;
use pencilkit::{arulwang, rootsets, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Command, CurveArgs, Outcome, PencilArg};

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).map_err(|e| anyhow!(Error::InvalidInput(format!("{}: {e}", path.display()))))
}

fn load_pencil(arg: &PencilArg) -> anyhow::Result<AnyPencil> {
    Ok(io::pencil_from_json(&read_json(&arg.pencil)?)?)
}

fn prime_pencil(arg: &PencilArg) -> anyhow::Result<Pencil<PrimeField>> {
    match load_pencil(arg)? {
        AnyPencil::Prime(p) => Ok(p),
        AnyPencil::Rational(_) => Err(Error::Unsupported("this command needs a pencil over a prime field".into()).into()),
    }
}

fn rational_pencil(arg: &PencilArg) -> anyhow::Result<Pencil<Rationals>> {
    match load_pencil(arg)? {
        AnyPencil::Rational(p) => Ok(p),
        AnyPencil::Prime(_) => Err(Error::Unsupported("this command needs a pencil over Q".into()).into()),
    }
}

fn load_curve(args: &CurveArgs) -> anyhow::Result<HyperellipticCurve> {
    let v = match (&args.curve, &args.f, &args.field) {
        (Some(path), _, _) => read_json(path)?,
        (None, Some(f), Some(field)) => json!({ "field": field, "f": f }),
        _ => return Err(Error::InvalidInput("give --curve, or both --f and --field".into()).into()),
    };
    Ok(io::curve_from_json(&v)?)
}

fn disc_json<F: Field>(p: &Pencil<F>) -> Value {
    let f = p.disc_poly();
    let r = PolyRing::new(p.field());
    json!({
        "f": r.to_json(&f),
        "degree": f.degree(),
        "full_degree": f.degree() == Some(p.dim()),
        "squarefree": r.is_squarefree(&f).unwrap_or(false),
    })
}

fn diagonalize_json<F: Field>(k: &F, degree: usize, roots: &[F::Elem], vectors: &[Vec<F::Elem>], diag: &[F::Elem], frob: &[usize]) -> Value {
    let elems = |xs: &[F::Elem]| xs.iter().map(|x| k.elem_to_json(x)).collect::<Vec<_>>();
    json!({
        "field": k.descriptor().to_json(),
        "degree": degree,
        "roots": elems(roots),
        "vectors": vectors.iter().map(|v| elems(v)).collect::<Vec<_>>(),
        "diag": elems(diag),
        "frobenius": frob,
    })
}

/// Random invertible matrix: small integers over Q, uniform over F_p.
fn random_invertible<F: Field>(k: &F, d: usize, rng: &mut ChaCha8Rng, sample: impl Fn(&mut ChaCha8Rng) -> i64) -> Mat<F> {
    loop {
        let m = Mat::<F>::from_fn(d, d, |_, _| k.from_i64(sample(rng)));
        if !k.is_zero(&linalg::det(k, &m)) {
            return m;
        }
    }
}

fn with_seed_conjugate<F: Field>(p: Pencil<F>, seed: u64, sample: impl Fn(&mut ChaCha8Rng) -> i64) -> anyhow::Result<(Pencil<F>, Mat<F>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_invertible(p.field(), p.dim(), &mut rng, sample);
    Ok((p.transform(&m)?, m))
}

fn arulwang_cmd(f: &str, field: &str, conjugate: bool, seed: u64) -> anyhow::Result<Value> {
    match io::parse_field(field)? {
        FieldDescriptor::Rationals => {
            let k = Rationals;
            let ap = arulwang::build(&k, &io::parse_poly(&k, f)?)?;
            let witness = ap.solubility_witness().to_json(&k);
            if conjugate {
                let (p, m) = with_seed_conjugate(ap.pencil, seed, |r| r.gen_range(-2..=2))?;
                return Ok(json!({ "pencil": io::pencil_to_json(&p), "basis_change": linalg::to_json(&k, &m), "seed": seed }));
            }
            Ok(json!({ "pencil": io::pencil_to_json(&ap.pencil), "witness": witness }))
        }
        FieldDescriptor::Prime { p } => {
            let k = PrimeField::new(p)?;
            let ap = arulwang::build(&k, &io::parse_poly(&k, f)?)?;
            let witness = ap.solubility_witness().to_json(&k);
            if conjugate {
                let (pc, m) = with_seed_conjugate(ap.pencil, seed, move |r| r.gen_range(0..p as i64))?;
                return Ok(json!({ "pencil": io::pencil_to_json(&pc), "basis_change": linalg::to_json(&k, &m), "seed": seed }));
            }
            Ok(json!({ "pencil": io::pencil_to_json(&ap.pencil), "witness": witness }))
        }
        other => Err(Error::Unsupported(format!("standard pencils over {other:?}")).into()),
    }
}

/// The curve y^2 = f / lc(f), which is y^2 = f up to isomorphism when lc(f)
/// is a square.
fn curve_of(p: &Pencil<PrimeField>) -> anyhow::Result<(HyperellipticCurve, bool)> {
    let k = p.field();
    let f = p.require_nonsingular()?;
    let r = PolyRing::new(k);
    let lc = *f.lc().unwrap();
    let monic = r.monic(&f);
    Ok((HyperellipticCurve::new(*k, monic)?, k.is_square(&lc)))
}

fn theta_cmd(p: &Pencil<PrimeField>) -> anyhow::Result<Value> {
    let split = p.splitting_data()?;
    let d = p.dim();
    let aut = p.aut_plus()?;
    let classes = rootsets::stable_classes(&split.frobenius);
    let mut rows = Vec::new();
    let mut all_inside = true;
    for &mask in &classes {
        let indices = rootsets::to_indices(mask);
        let image = theta(&indices, d)?;
        let inside = aut.elements.contains(&image);
        all_inside &= inside;
        rows.push(json!({ "class": indices, "image": image.indices(), "in_aut_plus": inside }));
    }
    let (curve, _) = curve_of(p)?;
    let torsion = curve.two_torsion()?.len();
    Ok(json!({
        "map": rows,
        "two_torsion": torsion,
        "aut_plus": aut.order(),
        "equivariant": all_inside && torsion == aut.order(),
    }))
}

fn reduce_pencil(p: &Pencil<Rationals>, q: u64) -> anyhow::Result<Pencil<PrimeField>> {
    let k = PrimeField::new(q)?;
    let conv = |m: &Mat<Rationals>| -> anyhow::Result<Mat<PrimeField>> {
        let rows = m
            .to_rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| k.from_rational(x).ok_or_else(|| Error::InvalidInput(format!("{x} has a denominator divisible by {q}"))))
                    .collect::<Result<Vec<u64>, Error>>()
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Mat::<PrimeField>::from_rows(rows)?)
    };
    Ok(Pencil::new(k, p.n(), conv(p.q1())?, conv(p.q2())?)?)
}

fn verify_jg(arg: &PencilArg, q: Option<u64>) -> anyhow::Result<Value> {
    let p = match (load_pencil(arg)?, q) {
        (AnyPencil::Prime(p), None) => p,
        (AnyPencil::Prime(p), Some(q)) if q == p.field().p() => p,
        (AnyPencil::Prime(p), Some(q)) => {
            return Err(Error::InvalidInput(format!("pencil is over F_{} but --q is {q}", p.field().p())).into())
        }
        (AnyPencil::Rational(p), Some(q)) => reduce_pencil(&p, q)?,
        (AnyPencil::Rational(_), None) => return Err(Error::InvalidInput("a rational pencil needs --q".into()).into()),
    };
    let (curve, lc_square) = curve_of(&p)?;
    if !lc_square {
        return Err(Error::Unsupported("the leading coefficient of f is not a square, so y^2 = f has no monic model".into()).into());
    }
    let catalog = isotropic::enumerate_common_isotropic(&p, p.n())?;
    let jac = curve.jacobian_order()?;
    let count = catalog.count() as u128;
    Ok(json!({ "q": p.field().p(), "I_g": count, "jac": jac, "equal": count == jac }))
}

fn twist_cmd(arg: &PencilArg, cocycle: &Path) -> anyhow::Result<Value> {
    let p = prime_pencil(arg)?;
    let spec = io::cocycle_from_json(&read_json(cocycle)?)?;
    let c = cocycle_from_two_torsion(&p, &spec.subset, spec.level)?;
    let t = twist_pencil(&p, &c)?;
    let k = &t.field;
    Ok(json!({
        "pencil": io::pencil_to_json(&t.pencil),
        "cocycle": c.to_json(),
        "level": t.level,
        "scalar": k.elem_to_json(&t.scalar),
        "delta": k.elem_to_json(&t.delta),
        "disc_preserved": t.pencil.disc_poly() == p.disc_poly(),
    }))
}

pub fn run(command: Command, seed: u64) -> anyhow::Result<Outcome> {
    let value = match command {
        Command::Disc(arg) => match load_pencil(&arg)? {
            AnyPencil::Prime(p) => disc_json(&p),
            AnyPencil::Rational(p) => disc_json(&p),
        },
        Command::Nonsingular(arg) => {
            let ok = match load_pencil(&arg)? {
                AnyPencil::Prime(p) => p.is_nonsingular(),
                AnyPencil::Rational(p) => p.is_nonsingular(),
            };
            json!({ "nonsingular": ok })
        }
        Command::Diagonalize(arg) => match load_pencil(&arg)? {
            AnyPencil::Prime(p) => {
                let s = p.splitting_data()?;
                diagonalize_json(&s.field, s.degree, &s.roots, &s.vectors, &s.diag, &s.frobenius)
            }
            AnyPencil::Rational(p) => {
                let s = p.splitting_data()?;
                diagonalize_json(&s.field, s.degree, &s.roots, &s.vectors, &s.diag, &s.frobenius)
            }
        },
        Command::Aut { pencil, level } => {
            let p = prime_pencil(&pencil)?;
            let g = p.aut_plus_over(level)?;
            json!({
                "level": level,
                "order": g.order(),
                "elements": g.elements.iter().map(|e| e.indices()).collect::<Vec<_>>(),
            })
        }
        Command::Theta(arg) => theta_cmd(&prime_pencil(&arg)?)?,
        Command::Arulwang { f, field, conjugate } => arulwang_cmd(&f, &field, conjugate, seed)?,
        Command::CurveCount { curve, m } => {
            let c = load_curve(&curve)?;
            json!({ "curve": c.to_json(), "m": m, "count": c.count_points(m)? })
        }
        Command::JacOrder(args) => {
            let c = load_curve(&args)?;
            json!({ "curve": c.to_json(), "numerator": c.zeta_numerator()?, "order": c.jacobian_order()? })
        }
        Command::TwoTorsion(args) => {
            let c = load_curve(&args)?;
            let t = c.two_torsion()?;
            json!({
                "curve": c.to_json(),
                "order": t.len(),
                "classes": t.iter().map(|x| x.indices()).collect::<Vec<_>>(),
            })
        }
        Command::Isotropic { pencil, s, count_only } => {
            let p = prime_pencil(&pencil)?;
            isotropic::enumerate_common_isotropic(&p, s)?.to_json(p.field(), count_only)
        }
        Command::Soluble(arg) => {
            let p = prime_pencil(&arg)?;
            let w = isotropic::soluble_witness(&p)?;
            json!({ "soluble": w.is_some(), "witness": w.map(|a| a.to_json(p.field())) })
        }
        Command::VerifyJg { pencil, q } => verify_jg(&pencil, q)?,
        Command::Twist { pencil, cocycle } => twist_cmd(&pencil, &cocycle)?,
        Command::AnalyzeX { pencil, prime_bound, height, node_budget, max_precision } => {
            let p = rational_pencil(&pencil)?;
            let cfg = AnalysisConfig { prime_bound, height_bound: height, node_budget, max_precision };
            let report = localglobal::analyze(&p, &cfg)?;
            return Ok(Outcome { value: report.to_json(), code: report.exit_code() as u8 });
        }
        Command::PointSearch { pencil, height } => {
            let p = rational_pencil(&pencil)?;
            let r = localglobal::point_search(&p, height)?;
            json!({
                "height_bound": r.height_bound,
                "point": r.point.map(|x| x.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                "height": r.height,
                "definite_form": r.definite_form,
            })
        }
    };
    Ok(value.into())
}
