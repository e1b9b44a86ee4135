//! Exact fields: the rationals, prime fields, flattened extensions of prime
//! fields, and p-adic numbers with tracked precision.
//!
//! Fields are context objects: elements are plain values and every operation
//! goes through the field that owns them, so one element type can serve many
//! moduli.

mod ext;
mod padic;
mod prime;
mod rational;

use std::fmt;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use ext::ExtField;
pub use padic::{PAdic, PadicField};
pub use prime::PrimeField;
#[cfg(test)]
pub(crate) use ext::is_irreducible_fp;
pub use rational::{parse_rational, rational_to_string, Rationals};

pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn descriptor(&self) -> FieldDescriptor;

    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        let (sign, digits) = n.to_u32_digits();
        let base = self.from_i64(1 << 32);
        let mut acc = self.zero();
        for d in digits.iter().rev() {
            acc = self.add(&self.mul(&acc, &base), &self.from_i64(*d as i64));
        }
        if sign == Sign::Minus {
            self.neg(&acc)
        } else {
            acc
        }
    }

    /// `None` when the denominator vanishes in this field.
    fn from_rational(&self, r: &BigRational) -> Option<Self::Elem> {
        self.div(&self.from_bigint(r.numer()), &self.from_bigint(r.denom()))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    fn pow_big(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Integer power allowing negative exponents on units.
    fn powi(&self, a: &Self::Elem, e: i64) -> Option<Self::Elem> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(&ai, e.unsigned_abs()))
        }
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            if !self.is_zero(x) && !self.is_zero(y) {
                acc = self.add(&acc, &self.mul(x, y));
            }
        }
        acc
    }
}

/// Finite fields of odd characteristic.
pub trait FiniteField: Field {
    /// Number of elements q.
    fn order(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    /// The element whose base-p digits (low to high) are its coordinates.
    fn element(&self, index: u64) -> Self::Elem;
    fn index_of(&self, a: &Self::Elem) -> u64;
    /// Coordinates over F_p in the power basis of the stored modulus.
    fn coords(&self, a: &Self::Elem) -> Vec<u64>;
    fn from_coords(&self, c: &[u64]) -> Self::Elem;
    /// Monic defining polynomial over F_p, low to high (`[0, 1]` for F_p itself).
    fn modulus(&self) -> Vec<u64>;

    fn prime(&self) -> u64 {
        self.characteristic()
    }

    /// Absolute Frobenius x -> x^p.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.prime())
    }

    /// x -> x^(p^e).
    fn frobenius_power(&self, a: &Self::Elem, e: usize) -> Self::Elem {
        let mut x = a.clone();
        for _ in 0..e {
            x = self.frobenius(&x);
        }
        x
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Self::Elem> + '_> {
        Box::new((0..self.order()).map(move |i| self.element(i)))
    }

    fn is_square(&self, a: &Self::Elem) -> bool {
        self.is_zero(a) || self.is_one(&self.pow(a, (self.order() - 1) / 2))
    }

    /// First nonsquare in index order.
    fn nonsquare(&self) -> Self::Elem {
        (1..self.order())
            .map(|i| self.element(i))
            .find(|x| !self.is_square(x))
            .expect("odd finite fields contain nonsquares")
    }

    /// Square root by Tonelli-Shanks; `None` for nonsquares.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let q1 = self.order() - 1;
        let s = q1.trailing_zeros();
        let t = q1 >> s;
        let z = self.nonsquare();
        let mut c = self.pow(&z, t);
        let mut x = self.pow(a, (t + 1) / 2);
        let mut b = self.pow(a, t);
        let mut m = s;
        while !self.is_one(&b) {
            let mut i = 0;
            let mut bb = b.clone();
            while !self.is_one(&bb) {
                bb = self.square(&bb);
                i += 1;
            }
            let mut w = c.clone();
            for _ in 0..(m - i - 1) {
                w = self.square(&w);
            }
            x = self.mul(&x, &w);
            c = self.square(&w);
            b = self.mul(&b, &c);
            m = i;
        }
        debug_assert_eq!(self.square(&x), *a);
        Some(x)
    }

    /// First generator of the multiplicative group in index order.
    fn primitive_element(&self) -> Self::Elem {
        let q1 = self.order() - 1;
        let primes = crate::arith::prime_factors_u64(q1);
        (1..self.order())
            .map(|i| self.element(i))
            .find(|x| primes.iter().all(|&r| !self.is_one(&self.pow(x, q1 / r))))
            .expect("finite fields have primitive elements")
    }

    fn random_elem<R: Rng>(&self, rng: &mut R) -> Self::Elem {
        self.element(rng.gen_range(0..self.order()))
    }
}

/// Serializable description of a base field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Rationals,
    Prime { p: u64 },
    Extension { p: u64, modulus: Vec<u64> },
    Padic { p: u64, precision: u32 },
}

impl FieldDescriptor {
    pub fn from_json(v: &Value) -> Result<Self> {
        serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidInput(format!("field descriptor: {e}")))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("descriptor serializes")
    }
}

/// Maps base-field elements into a field extension.
pub fn embed_prime<K: FiniteField>(target: &K, a: u64) -> K::Elem {
    target.from_i64(a as i64)
}
