use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::split_valuation;
use crate::error::{Error, Result};

/// Context for p-adic numbers of a fixed default absolute precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicField {
    pub p: u64,
    pub precision: u32,
}

impl PadicField {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !crate::arith::is_prime_u64(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("p-adic precision must be at least 1".into()));
        }
        Ok(Self { p, precision })
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<PAdic> {
        PAdic::from_rational(self.p, r, self.precision as i64)
    }

    pub fn from_int(&self, n: i64) -> PAdic {
        self.from_rational(&BigRational::from_integer(BigInt::from(n))).unwrap()
    }
}

/// A p-adic number p^val * unit, known modulo p^(val + rel).
///
/// `rel == 0` means the value is indistinguishable from zero at the absolute
/// precision `val`. Arithmetic tracks the precision loss of every step, so a
/// result never claims more digits than its inputs justify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    val: i64,
    unit: BigInt,
    rel: u32,
}

impl PAdic {
    /// Exact rational truncated to absolute precision `abs`.
    pub fn from_rational(p: u64, r: &BigRational, abs: i64) -> Result<Self> {
        if r.is_zero() {
            return Ok(Self::zero_to(p, abs));
        }
        let (vn, un) = split_valuation(r.numer(), p);
        let (vd, ud) = split_valuation(r.denom(), p);
        let val = vn as i64 - vd as i64;
        if val >= abs {
            return Ok(Self::zero_to(p, abs));
        }
        let rel = (abs - val) as u32;
        let modulus = BigInt::from(p).pow(rel);
        let inv = mod_inverse(&ud, &modulus)
            .ok_or_else(|| Error::InvalidInput("denominator not invertible".into()))?;
        let unit = (un * inv).mod_floor(&modulus);
        Ok(Self { p, val, unit, rel })
    }

    pub fn zero_to(p: u64, abs: i64) -> Self {
        Self { p, val: abs, unit: BigInt::zero(), rel: 0 }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Absolute precision N: the value is known modulo p^N.
    pub fn precision(&self) -> i64 {
        self.val + self.rel as i64
    }

    /// `None` when the value is zero to the available precision.
    pub fn valuation(&self) -> Option<i64> {
        (self.rel > 0).then_some(self.val)
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    fn pk(&self, k: u32) -> BigInt {
        BigInt::from(self.p).pow(k)
    }

    /// The integer representative in [0, p^N) when the valuation is
    /// nonnegative.
    pub fn residue(&self) -> Option<BigInt> {
        if self.val < 0 {
            return None;
        }
        if self.rel == 0 {
            return Some(BigInt::zero());
        }
        Some(&self.unit * self.pk(self.val as u32))
    }

    fn normalize(p: u64, val: i64, value: BigInt, abs: i64) -> Self {
        // value is known modulo p^(abs - val) and represents p^val * value
        if abs <= val {
            return Self::zero_to(p, abs);
        }
        let m = BigInt::from(p).pow((abs - val) as u32);
        let v = value.mod_floor(&m);
        if v.is_zero() {
            return Self::zero_to(p, abs);
        }
        let (extra, u) = split_valuation(&v, p);
        let val = val + extra as i64;
        let rel = (abs - val) as u32;
        let m = BigInt::from(p).pow(rel);
        Self { p, val, unit: u.mod_floor(&m), rel }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let abs = self.precision().min(other.precision());
        let v = self.val.min(other.val);
        let term = |x: &Self| -> BigInt {
            if x.rel == 0 {
                BigInt::zero()
            } else {
                &x.unit * BigInt::from(x.p).pow((x.val - v) as u32)
            }
        };
        Self::normalize(self.p, v, term(self) + term(other), abs)
    }

    pub fn neg(&self) -> Self {
        if self.rel == 0 {
            return self.clone();
        }
        let m = self.pk(self.rel);
        Self { p: self.p, val: self.val, unit: (-&self.unit).mod_floor(&m), rel: self.rel }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        match (self.rel, other.rel) {
            (0, 0) => Self::zero_to(self.p, self.val + other.val),
            (0, _) => Self::zero_to(self.p, self.val + other.val),
            (_, 0) => Self::zero_to(self.p, self.val + other.val),
            _ => {
                let rel = self.rel.min(other.rel);
                let m = self.pk(rel);
                Self {
                    p: self.p,
                    val: self.val + other.val,
                    unit: (&self.unit * &other.unit).mod_floor(&m),
                    rel,
                }
            }
        }
    }

    /// Fails when the value is zero to the available precision.
    pub fn inv(&self) -> Result<Self> {
        if self.rel == 0 {
            return Err(Error::InvalidInput("p-adic value indistinguishable from zero".into()));
        }
        let m = self.pk(self.rel);
        let u = mod_inverse(&self.unit, &m).expect("units are invertible");
        Ok(Self { p: self.p, val: -self.val, unit: u, rel: self.rel })
    }

    /// Square test; `None` when the precision is insufficient to decide.
    pub fn is_square(&self) -> Option<bool> {
        if self.rel == 0 {
            return None;
        }
        if self.val.rem_euclid(2) != 0 {
            return Some(false);
        }
        if self.p == 2 {
            if self.rel < 3 {
                return None;
            }
            Some((&self.unit % BigInt::from(8)) == BigInt::one())
        } else {
            Some(crate::arith::legendre(&self.unit, self.p) == 1)
        }
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}
