//! Dense univariate polynomials over an exact field.

use num_bigint::BigUint;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::Field;

/// Coefficients low to high; no trailing zeros (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Option<&E> {
        self.coeffs.last()
    }
}

/// Polynomial arithmetic over a borrowed field.
#[derive(Debug, Clone, Copy)]
pub struct PolyRing<'a, F: Field> {
    pub field: &'a F,
}

pub type P<F> = Poly<<F as Field>::Elem>;

impl<'a, F: Field> PolyRing<'a, F> {
    pub fn new(field: &'a F) -> Self {
        Self { field }
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<F::Elem>) -> P<F> {
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(&self, c: &[i64]) -> P<F> {
        self.from_coeffs(c.iter().map(|&x| self.field.from_i64(x)).collect())
    }

    pub fn zero(&self) -> P<F> {
        Poly { coeffs: vec![] }
    }

    pub fn one(&self) -> P<F> {
        self.constant(self.field.one())
    }

    pub fn x(&self) -> P<F> {
        self.monomial(self.field.one(), 1)
    }

    pub fn constant(&self, c: F::Elem) -> P<F> {
        self.from_coeffs(vec![c])
    }

    pub fn monomial(&self, c: F::Elem, k: usize) -> P<F> {
        let mut v = vec![self.field.zero(); k];
        v.push(c);
        self.from_coeffs(v)
    }

    /// Product of (x - r) over the given roots.
    pub fn from_roots(&self, roots: &[F::Elem]) -> P<F> {
        roots.iter().fold(self.one(), |acc, r| {
            self.mul(&acc, &self.from_coeffs(vec![self.field.neg(r), self.field.one()]))
        })
    }

    pub fn coeff(&self, a: &P<F>, i: usize) -> F::Elem {
        a.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let n = a.coeffs.len().max(b.coeffs.len());
        self.from_coeffs((0..n).map(|i| self.field.add(&self.coeff(a, i), &self.coeff(b, i))).collect())
    }

    pub fn sub(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let n = a.coeffs.len().max(b.coeffs.len());
        self.from_coeffs((0..n).map(|i| self.field.sub(&self.coeff(a, i), &self.coeff(b, i))).collect())
    }

    pub fn neg(&self, a: &P<F>) -> P<F> {
        Poly { coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect() }
    }

    pub fn scale(&self, a: &P<F>, c: &F::Elem) -> P<F> {
        self.from_coeffs(a.coeffs.iter().map(|x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &P<F>, b: &P<F>) -> P<F> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let f = self.field;
        let mut out = vec![f.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        self.from_coeffs(out)
    }

    pub fn pow(&self, a: &P<F>, e: u32) -> P<F> {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, a: &P<F>, b: &P<F>) -> (P<F>, P<F>) {
        let f = self.field;
        let db = b.degree().expect("division by the zero polynomial");
        let lc_inv = f.inv(b.lc().unwrap()).unwrap();
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return (self.zero(), a.clone());
        }
        let mut q = vec![f.zero(); r.len() - db];
        for top in (db..r.len()).rev() {
            let c = f.mul(&r[top], &lc_inv);
            if f.is_zero(&c) {
                continue;
            }
            let shift = top - db;
            for (i, bi) in b.coeffs.iter().enumerate() {
                r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bi));
            }
            q[shift] = c;
        }
        r.truncate(db);
        (self.from_coeffs(q), self.from_coeffs(r))
    }

    pub fn rem(&self, a: &P<F>, b: &P<F>) -> P<F> {
        self.divrem(a, b).1
    }

    /// Exact quotient; errors when b does not divide a.
    pub fn div_exact(&self, a: &P<F>, b: &P<F>) -> Result<P<F>> {
        let (q, r) = self.divrem(a, b);
        if !r.is_zero() {
            return Err(Error::InvalidInput("polynomial division is not exact".into()));
        }
        Ok(q)
    }

    pub fn monic(&self, a: &P<F>) -> P<F> {
        match a.lc() {
            None => a.clone(),
            Some(lc) => self.scale(a, &self.field.inv(lc).unwrap()),
        }
    }

    /// Monic gcd (zero when both inputs vanish).
    pub fn gcd(&self, a: &P<F>, b: &P<F>) -> P<F> {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Returns (g, s, t) with s*a + t*b = g, g monic.
    pub fn xgcd(&self, a: &P<F>, b: &P<F>) -> (P<F>, P<F>, P<F>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lc().cloned() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = self.field.inv(&lc).unwrap();
                (self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv))
            }
        }
    }

    pub fn derivative(&self, a: &P<F>) -> P<F> {
        self.from_coeffs(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.field.mul(c, &self.field.from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, a: &P<F>, x: &F::Elem) -> F::Elem {
        a.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| self.field.add(&self.field.mul(&acc, x), c))
    }

    /// a(b(x)).
    pub fn compose(&self, a: &P<F>, b: &P<F>) -> P<F> {
        a.coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, b), &self.constant(c.clone())))
    }

    pub fn mulmod(&self, a: &P<F>, b: &P<F>, m: &P<F>) -> P<F> {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &P<F>, e: &BigUint, m: &P<F>) -> P<F> {
        let mut acc = self.rem(&self.one(), m);
        let base = self.rem(a, m);
        for i in (0..e.bits()).rev() {
            acc = self.mulmod(&acc, &acc, m);
            if e.bit(i) {
                acc = self.mulmod(&acc, &base, m);
            }
        }
        acc
    }

    /// True iff gcd(f, f') is constant. Characteristic-p subtleties are
    /// handled by the degree check: f' = 0 forces gcd = f.
    pub fn is_squarefree(&self, f: &P<F>) -> Result<bool> {
        match f.degree() {
            None => Err(Error::InvalidInput("the zero polynomial has no squarefree status".into())),
            Some(0) => Ok(true),
            Some(_) => Ok(self.gcd(f, &self.derivative(f)).degree() == Some(0)),
        }
    }

    pub fn to_json(&self, a: &P<F>) -> Value {
        Value::Array(a.coeffs.iter().map(|c| self.field.elem_to_json(c)).collect())
    }

    pub fn from_json(&self, v: &Value) -> Result<P<F>> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("polynomial must be a coefficient list: {v}")))?;
        Ok(self.from_coeffs(arr.iter().map(|c| self.field.elem_from_json(c)).collect::<Result<_>>()?))
    }

    /// Maps coefficients into another field.
    pub fn map<G: Field>(&self, a: &P<F>, target: &'a G, f: impl Fn(&F::Elem) -> G::Elem) -> P<G> {
        PolyRing::new(target).from_coeffs(a.coeffs.iter().map(f).collect())
    }
}
