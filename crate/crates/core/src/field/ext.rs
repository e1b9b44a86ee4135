use serde_json::Value;

use super::{Field, FieldDescriptor, FiniteField, PrimeField};
use crate::arith::prime_factors_u64;
use crate::error::{Error, Result};

/// F_{p^k} presented as F_p[x]/(m(x)) with an explicitly stored monic
/// irreducible modulus. Elements are coefficient vectors of length k, low to
/// high. Degree 1 is allowed (modulus x), which makes F_p usable wherever an
/// extension is expected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtField {
    p: u64,
    k: usize,
    /// Monic, length k + 1.
    modulus: Vec<u64>,
    order: u64,
}

impl ExtField {
    /// The extension of degree k whose modulus is the first monic irreducible
    /// polynomial in index order (constant term varying fastest).
    pub fn new(p: u64, k: usize) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let order = checked_order(p, k)?;
        if k == 1 {
            return Ok(Self { p, k, modulus: vec![0, 1], order });
        }
        let count = order;
        for idx in 0..count {
            let mut m = digits(idx, p, k);
            m.push(1);
            if m[0] == 0 {
                continue;
            }
            if is_irreducible_fp(&base, &m) {
                return Ok(Self { p, k, modulus: m, order });
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        while m.last() == Some(&0) {
            m.pop();
        }
        if m.len() < 2 {
            return Err(Error::InvalidInput("modulus must have positive degree".into()));
        }
        let lc_inv = base.inv(m.last().unwrap()).unwrap();
        for c in m.iter_mut() {
            *c = base.mul(c, &lc_inv);
        }
        if !is_irreducible_fp(&base, &m) {
            return Err(Error::InvalidInput(format!("modulus {m:?} is reducible over F_{p}")));
        }
        let k = m.len() - 1;
        let order = checked_order(p, k)?;
        Ok(Self { p, k, modulus: m, order })
    }

    pub fn base(&self) -> PrimeField {
        PrimeField::new(self.p).unwrap()
    }

    /// The class of x.
    pub fn generator(&self) -> Vec<u64> {
        if self.k == 1 {
            return vec![0];
        }
        let mut g = vec![0; self.k];
        g[1] = 1;
        g
    }

    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[0] = a % self.p;
        v
    }

    /// Inverse of [`embed`](Self::embed) on the prime subfield.
    pub fn to_prime(&self, a: &[u64]) -> Option<u64> {
        if a[1..].iter().all(|&c| c == 0) {
            Some(a[0])
        } else {
            None
        }
    }
}

fn checked_order(p: u64, k: usize) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..k {
        q = q
            .checked_mul(p)
            .filter(|&q| q < 1 << 40)
            .ok_or_else(|| Error::Resource(format!("field of size {p}^{k} is too large")))?;
    }
    Ok(q)
}

fn digits(mut idx: u64, p: u64, k: usize) -> Vec<u64> {
    let mut v = Vec::with_capacity(k);
    for _ in 0..k {
        v.push(idx % p);
        idx /= p;
    }
    v
}

// Dense F_p[x] helpers used only to certify moduli.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(f: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let inv = f.inv(&m[dm]).unwrap();
    while r.len() > dm {
        let c = f.mul(r.last().unwrap(), &inv);
        let shift = r.len() - 1 - dm;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, mi));
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(f: &PrimeField, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
        }
    }
    poly_rem(f, &prod, m)
}

fn poly_gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// x^(p^e) mod m.
fn frob_x(f: &PrimeField, m: &[u64], e: usize) -> Vec<u64> {
    let mut x = poly_rem(f, &[0, 1], m);
    for _ in 0..e {
        // x <- x^p
        let mut acc = vec![1];
        let mut base = x.clone();
        let mut n = f.p();
        while n > 0 {
            if n & 1 == 1 {
                acc = poly_mulmod(f, &acc, &base, m);
            }
            base = poly_mulmod(f, &base, &base, m);
            n >>= 1;
        }
        x = acc;
    }
    x
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
pub(crate) fn is_irreducible_fp(f: &PrimeField, m: &[u64]) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    let xq = frob_x(f, m, k);
    if trim(xq) != poly_rem(f, &[0, 1], m) {
        return false;
    }
    for r in prime_factors_u64(k as u64) {
        let mut h = frob_x(f, m, k / r as usize);
        while h.len() < 2 {
            h.push(0);
        }
        h[1] = f.sub(&h[1], &1);
        let g = poly_gcd(f, &h, m);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl Field for ExtField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.embed(n.rem_euclid(self.p as i64) as u64)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|&x| if x == 0 { 0 } else { self.p - x }).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| if x >= y { x - y } else { x + self.p - y })
            .collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let k = self.k;
        let p = self.p;
        if k == 1 {
            return vec![a[0] * b[0] % p];
        }
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for top in (k..2 * k - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for i in 0..k {
                let sub = c * self.modulus[i] % p;
                let t = top - k + i;
                prod[t] = (prod[t] + p - sub) % p;
            }
        }
        prod.truncate(k);
        prod
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order - 2))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Extension { p: self.p, modulus: self.modulus.clone() }
    }
    fn elem_to_json(&self, a: &Vec<u64>) -> Value {
        Value::from(a.clone())
    }
    fn elem_from_json(&self, v: &Value) -> Result<Vec<u64>> {
        if let Some(n) = v.as_i64() {
            return Ok(self.from_i64(n));
        }
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("not an extension-field element: {v}")))?;
        if arr.len() > self.k {
            return Err(Error::InvalidInput(format!("too many coordinates in {v}")));
        }
        let mut out = vec![0; self.k];
        for (i, c) in arr.iter().enumerate() {
            let c = c
                .as_i64()
                .ok_or_else(|| Error::InvalidInput(format!("bad coordinate in {v}")))?;
            out[i] = c.rem_euclid(self.p as i64) as u64;
        }
        Ok(out)
    }
}

impl FiniteField for ExtField {
    fn order(&self) -> u64 {
        self.order
    }
    fn degree(&self) -> usize {
        self.k
    }
    fn element(&self, index: u64) -> Vec<u64> {
        digits(index, self.p, self.k)
    }
    fn index_of(&self, a: &Vec<u64>) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }
    fn coords(&self, a: &Vec<u64>) -> Vec<u64> {
        a.clone()
    }
    fn from_coords(&self, c: &[u64]) -> Vec<u64> {
        let mut v = vec![0; self.k];
        for (i, x) in c.iter().take(self.k).enumerate() {
            v[i] = x % self.p;
        }
        v
    }
    fn modulus(&self) -> Vec<u64> {
        self.modulus.clone()
    }
}
