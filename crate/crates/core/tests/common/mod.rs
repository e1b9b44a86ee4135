//! Random generators and brute-force oracles shared by the integration tests.
//! The oracles only borrow field arithmetic and elementary linear algebra from
//! the library.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pencilkit::factor;
use pencilkit::field::{ExtField, Field, FiniteField, PrimeField, Rationals};
use pencilkit::linalg::{self, Mat, Matrix};
use pencilkit::pencil::Pencil;
use pencilkit::poly::{PolyRing, P};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, k: &PrimeField, d: usize) -> Mat<PrimeField> {
    let mut m = Matrix::filled(d, d, 0u64);
    for i in 0..d {
        for j in i..d {
            let x = rng.gen_range(0..k.p());
            m.set(i, j, x);
            m.set(j, i, x);
        }
    }
    m
}

pub fn random_pencil(rng: &mut ChaCha8Rng, k: &PrimeField, n: usize) -> Pencil<PrimeField> {
    let d = 2 * n + 2;
    loop {
        let q1 = random_symmetric(rng, k, d);
        if k.is_zero(&linalg::det(k, &q1)) {
            continue;
        }
        let q2 = random_symmetric(rng, k, d);
        if let Ok(p) = Pencil::new(*k, n, q1, q2) {
            if p.is_nonsingular() {
                return p;
            }
        }
    }
}

pub fn random_invertible(rng: &mut ChaCha8Rng, k: &PrimeField, d: usize) -> Mat<PrimeField> {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| rng.gen_range(0..k.p()));
        if !k.is_zero(&linalg::det(k, &m)) {
            return m;
        }
    }
}

pub fn random_monic_squarefree(rng: &mut ChaCha8Rng, k: &PrimeField, d: usize) -> P<PrimeField> {
    let r = PolyRing::new(k);
    loop {
        let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..k.p())).collect();
        c.push(1);
        let f = r.from_coeffs(c);
        if r.is_squarefree(&f).unwrap() {
            return f;
        }
    }
}

/// Simultaneous eigenbasis over the splitting field: one kernel vector of
/// lambda Q1 - Q2 per root lambda of the discriminant.
pub struct Eigenbasis {
    pub field: ExtField,
    pub roots: Vec<Vec<u64>>,
    pub v: Mat<ExtField>,
    pub v_inv: Mat<ExtField>,
    pub q1: Mat<ExtField>,
    pub q2: Mat<ExtField>,
}

pub fn eigenbasis(p: &Pencil<PrimeField>) -> Eigenbasis {
    let k0 = p.field();
    let f = p.disc_poly();
    let s = factor::splitting_field(k0, &f).unwrap();
    let k = s.field.clone();
    let q1 = p.q1().map(|&x| k.embed(x));
    let q2 = p.q2().map(|&x| k.embed(x));
    let cols: Vec<Vec<Vec<u64>>> = s
        .roots
        .iter()
        .map(|lam| {
            let m = linalg::sub(&k, &linalg::scale(&k, &q1, lam), &q2);
            let ker = linalg::kernel(&k, &m);
            assert_eq!(ker.len(), 1, "radical of a degenerate member is a line");
            ker[0].clone()
        })
        .collect();
    let v = Matrix::from_cols(&cols).unwrap();
    let v_inv = linalg::inverse(&k, &v).expect("eigenvectors are independent");
    Eigenbasis { field: k, roots: s.roots, v, v_inv, q1, q2 }
}

/// Counts sign matrices V diag(e) V^-1 of determinant one that preserve both
/// forms, over the splitting field and over F_p, each modulo -1.
pub fn brute_sign_isometries(p: &Pencil<PrimeField>) -> (usize, usize) {
    let e = eigenbasis(p);
    let k = &e.field;
    let d = p.dim();
    let (mut all, mut rational) = (0, 0);
    for bits in 0u32..1 << d {
        if bits.count_ones() % 2 == 1 {
            continue;
        }
        let signs: Vec<Vec<u64>> =
            (0..d).map(|i| if bits >> i & 1 == 1 { k.from_i64(-1) } else { k.one() }).collect();
        let t = linalg::mul(k, &linalg::mul(k, &e.v, &linalg::diagonal(k, &signs)), &e.v_inv);
        if linalg::congruence(k, &e.q1, &t) != e.q1 || linalg::congruence(k, &e.q2, &t) != e.q2 {
            continue;
        }
        assert!(k.is_one(&linalg::det(k, &t)));
        all += 1;
        if (0..d).all(|i| (0..d).all(|j| k.to_prime(t.get(i, j)).is_some())) {
            rational += 1;
        }
    }
    (all / 2, rational / 2)
}

/// Even root subsets S with Frob(S) = S or its complement, modulo
/// complementation, with the Frobenius computed as x -> x^p.
pub fn stable_even_classes(k0: &PrimeField, f: &P<PrimeField>) -> usize {
    let s = factor::splitting_field(k0, f).unwrap();
    let k = &s.field;
    let d = s.roots.len();
    let frob: Vec<usize> =
        s.roots.iter().map(|r| s.roots.iter().position(|x| *x == k.pow(r, k0.p())).unwrap()).collect();
    let full = (1u32 << d) - 1;
    let mut n = 0;
    for mask in 0u32..1 << d {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let image = (0..d).filter(|&i| mask >> i & 1 == 1).fold(0u32, |acc, i| acc | 1 << frob[i]);
        if image == mask || image == full ^ mask {
            n += 1;
        }
    }
    n / 2
}

fn quadratic_character<K: FiniteField>(k: &K, a: &K::Elem) -> i64 {
    if k.is_zero(a) {
        0
    } else if k.is_one(&k.pow(a, (k.order() - 1) / 2)) {
        1
    } else {
        -1
    }
}

/// #C(F_{p^m}) for y^2 = f with f monic of even degree, counted directly.
pub fn count_points(k0: &PrimeField, f: &P<PrimeField>, m: usize) -> i64 {
    let k = ExtField::new(k0.p(), m).unwrap();
    let coeffs: Vec<Vec<u64>> = f.coeffs().iter().map(|&c| k.embed(c)).collect();
    let mut total = 2;
    for x in k.elements() {
        let v = coeffs.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, &x), c));
        total += 1 + quadratic_character(&k, &v);
    }
    total
}

/// #J(F_p) for genus 2 from the two point counts: L(1) = (N1^2 + N2)/2 - p.
pub fn genus2_jacobian_order(k0: &PrimeField, f: &P<PrimeField>) -> i64 {
    let n1 = count_points(k0, f, 1);
    let n2 = count_points(k0, f, 2);
    (n1 * n1 + n2) / 2 - k0.p() as i64
}

/// Coefficients h_j of 1/f(t) = t^-d sum_j h_j t^-j for monic f; the sum of
/// lambda^k / f'(lambda) over the roots equals h_(k-d+1).
pub fn inverse_series<F: Field>(k: &F, f: &P<F>, terms: usize) -> Vec<F::Elem> {
    let c = f.coeffs();
    let d = c.len() - 1;
    let mut h = vec![k.one()];
    for j in 1..terms {
        let mut acc = k.zero();
        for i in 1..=j.min(d) {
            acc = k.sub(&acc, &k.mul(&c[d - i], &h[j - i]));
        }
        h.push(acc);
    }
    h
}

pub fn small_primes(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p * p) <= n {
        if (&n % p).is_zero() {
            out.push(p);
            while (&n % p).is_zero() {
                n /= p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n.try_into().unwrap());
    }
    out
}

/// Whether sum a_i x_i^2 has a primitive zero modulo p^depth, by lifting
/// digit by digit from the zeros modulo p.
pub fn brute_local_zero(coeffs: &[i64], p: u64, depth: u32) -> bool {
    let n = coeffs.len();
    let p = p as i64;
    let modulus = p.pow(depth);
    let eval = |x: &[i64]| -> i64 {
        coeffs.iter().zip(x).fold(0i64, |acc, (a, v)| (acc + a * (v * v % modulus)) % modulus)
    };
    fn digits(mut idx: i64, p: i64, n: usize) -> Vec<i64> {
        (0..n)
            .map(|_| {
                let r = idx % p;
                idx /= p;
                r
            })
            .collect()
    }
    fn dfs(x: &mut Vec<i64>, j: u32, depth: u32, p: i64, eval: &dyn Fn(&[i64]) -> i64) -> bool {
        if j == depth {
            return true;
        }
        let n = x.len();
        let pj = p.pow(j);
        let next = pj * p;
        let base = x.clone();
        for idx in 0..p.pow(n as u32) {
            let y = digits(idx, p, n);
            if j == 0 && y.iter().all(|&c| c == 0) {
                continue;
            }
            for i in 0..n {
                x[i] = base[i] + pj * y[i];
            }
            if eval(x).rem_euclid(next) == 0 && dfs(x, j + 1, depth, p, eval) {
                return true;
            }
        }
        x.copy_from_slice(&base);
        false
    }
    dfs(&mut vec![0; n], 0, depth, p, &eval)
}

pub fn is_rational_square(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    let sq = |n: &BigInt| {
        let s = n.sqrt();
        &s * &s == *n
    };
    sq(r.numer()) && sq(r.denom())
}

/// Positive or negative definiteness by leading principal minors.
pub fn sylvester_definite(g: &Mat<Rationals>) -> bool {
    let d = g.rows();
    let minors: Vec<BigRational> = (1..=d)
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            linalg::det(&Rationals, &g.submatrix(&idx, &idx))
        })
        .collect();
    let positive = minors.iter().all(|m| m.is_positive());
    let negative = minors.iter().enumerate().all(|(i, m)| if i.is_even() { m.is_negative() } else { m.is_positive() });
    positive || negative
}
