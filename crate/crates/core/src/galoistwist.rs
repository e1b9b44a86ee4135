//! Twisting a pencil over F_p by a cocycle of Gal(F_{p^m}/F_p) with values in
//! its automorphism group, made explicit by Galois descent.
//!
//! A cocycle is given by its value a = T_S at the Frobenius, S an even set of
//! radical lines. In the group of sign changes modulo -1 the cocycle
//! condition says that S is fixed by pi^m (pi the Frobenius permutation of
//! the roots) and that X_m = S + pi(S) + ... + pi^(m-1)(S) (symmetric
//! difference) is empty or everything. The twist is computed as follows:
//!
//! 1. pass to a level M divisible by m and by the splitting degree, and pick
//!    g in mu_d(F_{p^M}) with N(g) (-1)^[X_M full] = 1, so that b = g T_S
//!    satisfies b phi(b) ... phi^(M-1)(b) = 1 (if no g exists, M is doubled);
//! 2. the F_p-points of the twist are W = { x : b phi(x) = x }, a d-dimensional
//!    F_p-space spanning F_{p^M}^d, found as a kernel over F_p;
//! 3. the forms on W take values in delta^-1 F_p where phi(delta) = g^2 delta,
//!    and delta comes from an additive Hilbert 90 sum;
//! 4. one basis vector is rescaled by an F_p scalar so that both Gram
//!    determinants, and hence the discriminant, are preserved exactly.

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor::Embedding;
use crate::field::{ExtField, Field, FiniteField, PrimeField};
use crate::linalg::{self, Mat, Matrix};
use crate::pencil::{AutElement, Pencil, SplittingData};
use crate::rootsets;

/// Twists never go beyond this extension degree.
pub const MAX_LEVEL: usize = 48;

/// A cocycle of Gal(F_{p^m}/F_p) determined by its value at the Frobenius.
#[derive(Debug, Clone)]
pub struct GaloisCocycle {
    pub level: usize,
    pub value: AutElement,
    /// Field of definition of the lift: degree lcm(m, splitting degree).
    pub field: ExtField,
    /// The determinant-one isometry V diag(+-1) V^-1 lifting the value.
    pub lift: Mat<ExtField>,
    /// epsilon[i][j] = alpha_i phi^i(alpha_j) alpha_(i+j)^-1 in {1, -1},
    /// where alpha_i is the lift of the cocycle at phi^i.
    pub epsilon: Vec<Vec<i8>>,
    /// Whether X_m is the full root set, i.e. alpha_m = -1.
    pub wraps_negative: bool,
}

impl GaloisCocycle {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.level,
            "subset": self.value.indices(),
            "epsilon": self.epsilon,
        })
    }
}

fn symmetric_orbit_sum(mask: u64, perm: &[usize], count: usize) -> u64 {
    let mut x = 0u64;
    let mut cur = mask;
    for _ in 0..count {
        x ^= cur;
        cur = rootsets::apply_perm(cur, perm);
    }
    x
}

fn frob_matrix(k: &ExtField, a: &Mat<ExtField>, e: usize) -> Mat<ExtField> {
    a.map(|x| k.frobenius_power(x, e))
}

/// Splitting data embedded at a level divisible by `level`.
fn split_at(p: &Pencil<PrimeField>, level: usize) -> Result<(SplittingData<ExtField>, usize)> {
    let s = p.splitting_data()?;
    let big = s.degree.lcm(&level);
    let w = ExtField::new(p.field().p(), big)?;
    let e = Embedding::new(&s.field, &w)?;
    Ok((s.embed(&e), big))
}

fn scalar_sign(k: &ExtField, a: &Mat<ExtField>) -> Option<i8> {
    let n = a.rows();
    for (c, s) in [(k.one(), 1i8), (k.from_i64(-1), -1)] {
        if *a == linalg::scale(k, &linalg::identity(k, n), &c) {
            return Some(s);
        }
    }
    None
}

/// Checks the cocycle condition for the value `a` at level m by explicit
/// matrix products and computes the epsilon table.
pub fn validate_cocycle(p: &Pencil<PrimeField>, a: AutElement, m: usize) -> Result<GaloisCocycle> {
    if m == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let d = p.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
    }
    let (split, big) = split_at(p, m)?;
    let k = split.field.clone();
    let perm = &split.frobenius;
    if rootsets::canonical(rootsets::apply_perm(a.mask(), &rootsets::perm_power(perm, m)), d) != a.mask() {
        return Err(Error::InvalidCocycle(format!(
            "subset {:?} is not defined over the degree {m} extension",
            a.indices()
        )));
    }
    let lift = a.lift(&split);
    // alpha_i = T phi(T) ... phi^(i-1)(T), for i = 0..=2m
    let mut alphas = vec![linalg::identity(&k, d)];
    for i in 0..2 * m {
        let next = linalg::mul(&k, &alphas[i], &frob_matrix(&k, &lift, i));
        alphas.push(next);
    }
    let Some(sign_m) = scalar_sign(&k, &alphas[m]) else {
        return Err(Error::InvalidCocycle(format!(
            "the product of the Frobenius conjugates of {:?} over {m} steps is not +-1",
            a.indices()
        )));
    };
    let x_m = symmetric_orbit_sum(a.mask(), perm, m);
    debug_assert_eq!(x_m == rootsets::full(d), sign_m == -1);
    let alpha_inv: Vec<Mat<ExtField>> =
        alphas[..m].iter().map(|t| linalg::inverse(&k, t).expect("isometries are invertible")).collect();
    let mut epsilon = vec![vec![0i8; m]; m];
    for i in 0..m {
        for j in 0..m {
            let prod = linalg::mul(&k, &linalg::mul(&k, &alphas[i], &frob_matrix(&k, &alphas[j], i)), &alpha_inv[(i + j) % m]);
            epsilon[i][j] = scalar_sign(&k, &prod).expect("coboundary of a projective cocycle is scalar");
        }
    }
    debug_assert!(big % m == 0);
    Ok(GaloisCocycle { level: m, value: a, field: k, lift, epsilon, wraps_negative: sign_m == -1 })
}

/// The cocycle attached to a 2-torsion class given by an even subset of root
/// indices.
pub fn cocycle_from_two_torsion(p: &Pencil<PrimeField>, indices: &[usize], m: usize) -> Result<GaloisCocycle> {
    let a = AutElement::from_indices(indices, p.dim())?;
    validate_cocycle(p, a, m).map_err(|e| match e {
        Error::InvalidCocycle(msg) => Error::InvalidInput(msg),
        other => other,
    })
}

/// Every even class S (canonical) giving a cocycle at level m.
pub fn cocycle_classes(p: &Pencil<PrimeField>, m: usize) -> Result<Vec<AutElement>> {
    let d = p.dim();
    let perm = p.splitting_data()?.frobenius;
    let perm_m = rootsets::perm_power(&perm, m);
    Ok((0..1u64 << (d - 1))
        .filter(|&s| rootsets::is_even(s))
        .filter(|&s| rootsets::canonical(rootsets::apply_perm(s, &perm_m), d) == s)
        .filter(|&s| {
            let x = symmetric_orbit_sum(s, &perm, m);
            x == 0 || x == rootsets::full(d)
        })
        .map(|s| AutElement::from_mask(s, d).unwrap())
        .collect())
}

/// The twisted pencil with the data that certifies it.
#[derive(Debug, Clone)]
pub struct Twist {
    pub pencil: Pencil<PrimeField>,
    /// Working extension degree M.
    pub level: usize,
    pub field: ExtField,
    /// Root of unity g with b = g T_S a genuine cocycle.
    pub scalar: Vec<u64>,
    /// delta with phi(delta) = g^2 delta.
    pub delta: Vec<u64>,
    /// Columns: an F_p-basis of the fixed space of x -> b phi(x).
    pub basis: Mat<ExtField>,
}

fn norm_to_prime(k: &ExtField, g: &Vec<u64>) -> Vec<u64> {
    (0..k.degree()).fold(k.one(), |acc, i| k.mul(&acc, &k.frobenius_power(g, i)))
}

/// Elements of mu_d in the field, sorted: the distinct values x^((q-1)/e)
/// with e = gcd(d, q - 1).
fn roots_of_unity(k: &ExtField, d: u64) -> Vec<Vec<u64>> {
    let n = k.order() - 1;
    let e = d.gcd(&n);
    let mut out: Vec<Vec<u64>> = Vec::new();
    for idx in 1..k.order() {
        let z = k.pow(&k.element(idx), n / e);
        if !out.contains(&z) {
            out.push(z);
            if out.len() as u64 == e {
                break;
            }
        }
    }
    out.sort();
    out
}

/// delta != 0 with phi(delta) = c^-1 delta given N(c) = 1: the sum
/// b = sum_i c phi(c) ... phi^(i-1)(c) phi^i(z) satisfies phi(b) = b / c.
fn hilbert90(k: &ExtField, c: &Vec<u64>) -> Vec<u64> {
    let m = k.degree();
    for idx in 1..k.order() {
        let z = k.element(idx);
        let mut coeff = k.one();
        let mut ci = c.clone();
        let mut zi = z;
        let mut b = k.zero();
        for _ in 0..m {
            b = k.add(&b, &k.mul(&coeff, &zi));
            coeff = k.mul(&coeff, &ci);
            ci = k.frobenius(&ci);
            zi = k.frobenius(&zi);
        }
        if !k.is_zero(&b) {
            return b;
        }
    }
    unreachable!("the additive Hilbert 90 sum is nonzero for some z")
}

pub fn twist_pencil(p: &Pencil<PrimeField>, c: &GaloisCocycle) -> Result<Twist> {
    let d = p.dim();
    let prime = p.field().p();
    let (split0, m0) = split_at(p, c.level)?;
    let mut level = m0;
    loop {
        if level > MAX_LEVEL {
            return Err(Error::ExtensionGrowth(format!(
                "no root of unity splits the cocycle below degree {MAX_LEVEL}"
            )));
        }
        let k = ExtField::new(prime, level)?;
        let split = split0.embed(&Embedding::new(&split0.field, &k)?);
        let full = symmetric_orbit_sum(c.value.mask(), &split.frobenius, level) == rootsets::full(d);
        let target = if full { k.from_i64(-1) } else { k.one() };
        let Some(g) = roots_of_unity(&k, d as u64).into_iter().find(|g| norm_to_prime(&k, g) == target) else {
            level *= 2;
            continue;
        };
        return descend(p, &k, &split, c.value, g, level);
    }
}

fn descend(
    p: &Pencil<PrimeField>,
    k: &ExtField,
    split: &SplittingData<ExtField>,
    value: AutElement,
    g: Vec<u64>,
    level: usize,
) -> Result<Twist> {
    let d = p.dim();
    let fp = *p.field();
    let b = linalg::scale(k, &value.lift(split), &g);
    // x -> b phi(x) - x as an F_p-linear map on F_p^(d M)
    let dim = d * level;
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(dim);
    for i in 0..d {
        for j in 0..level {
            let mut unit = vec![0u64; level];
            unit[j] = 1;
            let mut x = vec![k.zero(); d];
            x[i] = k.from_coords(&unit);
            let fx: Vec<Vec<u64>> = x.iter().map(|e| k.frobenius(e)).collect();
            let y = linalg::mul_vec(k, &b, &fx);
            let col: Vec<u64> = y.iter().zip(&x).flat_map(|(yi, xi)| k.coords(&k.sub(yi, xi))).collect();
            cols.push(col);
        }
    }
    let op = Matrix::from_cols(&cols)?;
    let ker = linalg::kernel(&fp, &op);
    if ker.len() != d {
        return Err(Error::InvalidCocycle(format!("fixed space has dimension {} instead of {d}", ker.len())));
    }
    let vectors: Vec<Vec<Vec<u64>>> = ker
        .iter()
        .map(|v| (0..d).map(|i| k.from_coords(&v[i * level..(i + 1) * level])).collect())
        .collect();
    let mut basis = Matrix::from_cols(&vectors)?;
    let det = linalg::det(k, &basis);
    if k.is_zero(&det) {
        return Err(Error::InvalidCocycle("fixed space does not span".into()));
    }
    let g2inv = k.inv(&k.square(&g)).unwrap();
    let delta = hilbert90(k, &g2inv);
    debug_assert_eq!(k.frobenius(&delta), k.mul(&k.square(&g), &delta));
    let y = k.mul(&k.pow(&delta, (d / 2) as u64), &det);
    let y = k.to_prime(&y).ok_or_else(|| Error::InvalidCocycle("normalizing scalar is not rational".into()))?;
    let yinv = k.embed(fp.inv(&y).unwrap());
    for r in 0..d {
        let v = k.mul(basis.get(r, 0), &yinv);
        basis.set(r, 0, v);
    }
    let (q1, q2) = p.over(k);
    let descend_form = |q: &Mat<ExtField>| -> Result<Mat<PrimeField>> {
        let t = linalg::scale(k, &linalg::congruence(k, q, &basis), &delta);
        let rows: Option<Vec<Vec<u64>>> = t.to_rows().iter().map(|r| r.iter().map(|x| k.to_prime(x)).collect()).collect();
        Matrix::from_rows(rows.ok_or_else(|| Error::InvalidCocycle("descended form is not rational".into()))?)
    };
    let pencil = Pencil::new(fp, p.n(), descend_form(&q1)?, descend_form(&q2)?)?;
    Ok(Twist { pencil, level, field: k.clone(), scalar: g, delta, basis })
}
