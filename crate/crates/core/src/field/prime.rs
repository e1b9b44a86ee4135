use serde_json::Value;

use super::{Field, FieldDescriptor, FiniteField};
use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

/// The prime field F_p, p an odd prime below 2^31. Elements are reduced
/// representatives in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidInput(
                "characteristic 2 is not supported".into(),
            ));
        }
        if !is_prime_u64(p) || p >= 1 << 31 {
            return Err(Error::InvalidInput(format!(
                "{p} is not an odd prime below 2^31"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    /// Symmetric representative in (-p/2, p/2].
    pub fn centered(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce(n)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on i64
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(self.reduce(t0))
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Prime { p: self.p }
    }
    fn elem_to_json(&self, a: &u64) -> Value {
        Value::from(*a)
    }
    fn elem_from_json(&self, v: &Value) -> Result<u64> {
        if let Some(n) = v.as_i64() {
            return Ok(self.reduce(n));
        }
        if let Some(s) = v.as_str() {
            let r = super::parse_rational(s)?;
            let num = self.from_bigint(r.numer());
            let den = self.from_bigint(r.denom());
            return self
                .div(&num, &den)
                .ok_or_else(|| Error::InvalidInput(format!("{s} has denominator divisible by {}", self.p)));
        }
        Err(Error::InvalidInput(format!("not an F_{} element: {v}", self.p)))
    }
}

impl FiniteField for PrimeField {
    fn order(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn element(&self, index: u64) -> u64 {
        index
    }
    fn index_of(&self, a: &u64) -> u64 {
        *a
    }
    fn coords(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
    fn from_coords(&self, c: &[u64]) -> u64 {
        c.first().copied().unwrap_or(0) % self.p
    }
    fn modulus(&self) -> Vec<u64> {
        vec![0, 1]
    }
    fn frobenius(&self, a: &u64) -> u64 {
        *a
    }
}
