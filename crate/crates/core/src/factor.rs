//! Factorization of polynomials over finite fields, root finding, splitting
//! fields of F_p-polynomials and embeddings between extension fields.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::factor_bigint;
use crate::error::{Error, Result};
use crate::field::{ExtField, Field, FiniteField, PrimeField, Rationals};
use crate::poly::{Poly, PolyRing, P};

const EDF_SEED: u64 = 0x00c0_ffee;

fn sort_factors<E: Ord + Clone>(v: &mut [(Poly<E>, u32)]) {
    v.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by degree and then coefficient order.
pub fn factor<F: FiniteField>(field: &F, f: &P<F>) -> Result<Vec<(P<F>, u32)>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let r = PolyRing::new(field);
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(field, &r.monic(f)) {
        for (g, d) in distinct_degree(field, &sqf) {
            for h in equal_degree(field, &g, d, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    sort_factors(&mut out);
    Ok(out)
}

/// Writes a monic f as a product of powers of pairwise coprime squarefree
/// polynomials: f = prod g_i^{e_i}.
pub fn squarefree_decomposition<F: FiniteField>(field: &F, f: &P<F>) -> Vec<(P<F>, u32)> {
    let r = PolyRing::new(field);
    let p = field.prime() as u32;
    let mut out = Vec::new();
    let mut stack = vec![(r.monic(f), 1u32)];
    while let Some((f, scale)) = stack.pop() {
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        let df = r.derivative(&f);
        if df.is_zero() {
            stack.push((pth_root(field, &f), scale * p));
            continue;
        }
        let mut c = r.gcd(&f, &df);
        let mut w = r.div_exact(&f, &c).unwrap();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = r.gcd(&w, &c);
            let z = r.div_exact(&w, &y).unwrap();
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i * scale));
            }
            i += 1;
            w = y;
            c = r.div_exact(&c, &w).unwrap();
        }
        if c.degree().unwrap_or(0) > 0 {
            stack.push((pth_root(field, &c), scale * p));
        }
    }
    out
}

/// g with g^p = f, for f a polynomial in x^p.
fn pth_root<F: FiniteField>(field: &F, f: &P<F>) -> P<F> {
    let p = field.prime() as usize;
    let k = field.degree();
    let r = PolyRing::new(field);
    r.from_coeffs(
        f.coeffs()
            .iter()
            .step_by(p)
            .map(|c| field.frobenius_power(c, k - 1))
            .collect(),
    )
}

fn big_order<F: FiniteField>(field: &F) -> BigUint {
    BigUint::from(field.order())
}

/// Splits a squarefree monic f into products of all irreducible factors of
/// each degree.
pub fn distinct_degree<F: FiniteField>(field: &F, f: &P<F>) -> Vec<(P<F>, usize)> {
    let r = PolyRing::new(field);
    let q = big_order(field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = r.rem(&r.x(), &rest);
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = r.powmod(&h, &q, &rest);
        let g = r.gcd(&rest, &r.sub(&h, &r.x()));
        if g.degree().unwrap_or(0) > 0 {
            rest = r.div_exact(&rest, &g).unwrap();
            h = r.rem(&h, &rest);
            out.push((g, d));
        }
    }
    if let Some(dr) = rest.degree().filter(|&d| d > 0) {
        out.push((rest, dr));
    }
    out
}

/// Cantor-Zassenhaus splitting of a product of distinct monic irreducibles
/// of common degree d.
pub fn equal_degree<F: FiniteField, R: rand::Rng>(
    field: &F,
    f: &P<F>,
    d: usize,
    rng: &mut R,
) -> Vec<P<F>> {
    let r = PolyRing::new(field);
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![r.monic(f)];
    }
    let e = (big_order(field).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = r.from_coeffs((0..n).map(|_| field.random_elem(rng)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = r.gcd(&a, f);
        let split = if g.degree().unwrap_or(0) > 0 {
            g
        } else {
            let b = r.powmod(&a, &e, f);
            r.gcd(&r.sub(&b, &r.one()), f)
        };
        let ds = split.degree().unwrap_or(0);
        if ds > 0 && ds < n {
            let other = r.div_exact(f, &split).unwrap();
            let mut out = equal_degree(field, &split, d, rng);
            out.extend(equal_degree(field, &other, d, rng));
            return out;
        }
    }
}

/// Factorization by trial division with every monic polynomial up to half
/// the degree. Intended as a cross-check for small fields.
pub fn factor_trial_division<F: FiniteField>(field: &F, f: &P<F>) -> Result<Vec<(P<F>, u32)>> {
    let r = PolyRing::new(field);
    let n = f.degree().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let q = field.order();
    let half = n / 2;
    if (q as f64).powi(half as i32) > 1e6 {
        return Err(Error::Resource("trial division search space above 10^6".into()));
    }
    let mut rest = r.monic(f);
    let mut out: Vec<(P<F>, u32)> = Vec::new();
    for d in 1..=half {
        let count = q.pow(d as u32);
        for idx in 0..count {
            if rest.degree().unwrap_or(0) < 2 * d {
                break;
            }
            let mut c: Vec<F::Elem> = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                c.push(field.element(t % q));
                t /= q;
            }
            c.push(field.one());
            let g = r.from_coeffs(c);
            let mut m = 0;
            loop {
                let (qt, rem) = r.divrem(&rest, &g);
                if !rem.is_zero() {
                    break;
                }
                rest = qt;
                m += 1;
            }
            if m > 0 {
                out.push((g, m));
            }
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push((rest, 1));
    }
    sort_factors(&mut out);
    Ok(out)
}

/// Distinct roots of f lying in the field itself, sorted.
pub fn roots<F: FiniteField>(field: &F, f: &P<F>) -> Vec<F::Elem> {
    let r = PolyRing::new(field);
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let f = r.monic(f);
    let xq = r.powmod(&r.x(), &big_order(field), &f);
    let g = r.gcd(&f, &r.sub(&xq, &r.x()));
    if g.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out: Vec<F::Elem> = equal_degree(field, &g, 1, &mut rng)
        .into_iter()
        .map(|h| field.neg(&h.coeffs()[0]))
        .collect();
    out.sort();
    out
}

/// Splitting field of a squarefree polynomial over F_p.
#[derive(Debug, Clone)]
pub struct Splitting {
    /// Degree of the splitting field over F_p.
    pub degree: usize,
    pub field: ExtField,
    /// All roots, sorted by coefficient vector.
    pub roots: Vec<Vec<u64>>,
    /// Degrees of the irreducible factors over F_p, sorted.
    pub factor_degrees: Vec<usize>,
}

pub fn splitting_field(base: &PrimeField, f: &P<PrimeField>) -> Result<Splitting> {
    let r = PolyRing::new(base);
    if f.is_zero() || !r.is_squarefree(f)? {
        return Err(Error::InvalidInput("splitting field requires a squarefree polynomial".into()));
    }
    let factors = factor(base, f)?;
    let degrees: Vec<usize> = factors.iter().map(|(g, _)| g.degree().unwrap()).collect();
    let m = degrees.iter().fold(1usize, |acc, &d| acc.lcm(&d));
    let k = ExtField::new(base.p(), m)?;
    let roots = roots_over(&k, f);
    debug_assert_eq!(roots.len(), f.degree().unwrap());
    Ok(Splitting { degree: m, field: k, roots, factor_degrees: degrees })
}

/// Roots in an extension of a polynomial with F_p coefficients.
pub fn roots_over(k: &ExtField, f: &P<PrimeField>) -> Vec<Vec<u64>> {
    let rk = PolyRing::new(k);
    let fk = rk.from_coeffs(f.coeffs().iter().map(|&c| k.embed(c)).collect());
    roots(k, &fk)
}

/// A field homomorphism from one extension of F_p into another, determined by
/// the image of the generator of the source.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub source: ExtField,
    pub target: ExtField,
    image: Vec<u64>,
}

impl Embedding {
    /// Uses the smallest root of the source modulus in the target; fails when
    /// the source degree does not divide the target degree.
    pub fn new(source: &ExtField, target: &ExtField) -> Result<Self> {
        if source.characteristic() != target.characteristic() || target.degree() % source.degree() != 0 {
            return Err(Error::InvalidInput(format!(
                "no embedding of F_{}^{} into F_{}^{}",
                source.characteristic(),
                source.degree(),
                target.characteristic(),
                target.degree()
            )));
        }
        let base = source.base();
        let m = PolyRing::new(&base).from_coeffs(source.modulus());
        let image = if source.degree() == 1 {
            target.zero()
        } else {
            roots_over(target, &m).into_iter().next().expect("modulus splits in the target")
        };
        Ok(Self { source: source.clone(), target: target.clone(), image })
    }

    pub fn apply(&self, a: &[u64]) -> Vec<u64> {
        let t = &self.target;
        let coords = self.source.coords(&a.to_vec());
        if self.source.degree() == 1 {
            return t.embed(coords[0]);
        }
        coords
            .iter()
            .rev()
            .fold(t.zero(), |acc, &c| t.add(&t.mul(&acc, &self.image), &t.embed(c)))
    }

    /// The source element mapping to `b`, if `b` lies in the image.
    pub fn preimage(&self, b: &[u64]) -> Option<Vec<u64>> {
        let s = &self.source;
        let t = &self.target;
        let fp = s.base();
        let k = s.degree();
        // columns: images of the power basis, then b
        let mut cols: Vec<Vec<u64>> = (0..k)
            .map(|j| {
                let mut e = vec![0; k];
                e[j] = 1;
                t.coords(&self.apply(&e))
            })
            .collect();
        cols.push(t.coords(&b.to_vec()));
        let m = crate::linalg::Matrix::from_cols(&cols).ok()?;
        let (r, piv) = crate::linalg::rref(&fp, &m);
        if piv.contains(&k) {
            return None;
        }
        let mut out = vec![0; k];
        for (row, &c) in piv.iter().enumerate() {
            out[c] = *r.get(row, k);
        }
        Some(s.from_coords(&out))
    }
}

/// Distinct rational roots of a nonzero rational polynomial, sorted.
pub fn rational_roots(f: &P<Rationals>) -> Result<Vec<BigRational>> {
    let q = Rationals;
    let r = PolyRing::new(&q);
    let n = f.degree().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    // clear denominators
    let den = f.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let mut out = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        out.push(BigRational::zero());
    }
    let a0 = ints[low].abs();
    let an = ints[n].abs();
    let da = divisors(&a0)?;
    let dn = divisors(&an)?;
    let fr = r.from_coeffs(f.coeffs().to_vec());
    for num in &da {
        for d in &dn {
            for sign in [1, -1] {
                let cand = BigRational::new(num * BigInt::from(sign), d.clone());
                if r.eval(&fr, &cand).is_zero() && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let fac = factor_bigint(n);
    if !fac.is_complete() {
        return Err(Error::Resource(format!("could not factor {n}")));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in fac.primes {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        out = next;
        if out.len() > 100_000 {
            return Err(Error::Resource("too many divisors for the rational root search".into()));
        }
    }
    Ok(out)
}
