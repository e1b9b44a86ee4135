//! The curve y^2 = f(t) for monic squarefree f of even degree over F_p:
//! point counts, the zeta numerator, the Jacobian order and its rational
//! 2-torsion.

pub mod cantor;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor;
use crate::field::{ExtField, Field, FiniteField, PrimeField};
use crate::poly::{PolyRing, P};
use crate::rootsets;

pub use cantor::{MumfordDivisor, OddModel};

/// Largest field that point counting will enumerate.
pub const ENUMERATION_BOUND: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticCurve {
    field: PrimeField,
    f: P<PrimeField>,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(field: PrimeField, f: P<PrimeField>) -> Result<Self> {
        let d = f.degree().unwrap_or(0);
        if d < 4 || d % 2 == 1 {
            return Err(Error::InvalidInput(format!(
                "expected an even-degree model of degree at least 4, got degree {d}; move a rational point to infinity first"
            )));
        }
        if !field.is_one(f.lc().unwrap()) {
            return Err(Error::InvalidInput("f must be monic".into()));
        }
        if !PolyRing::new(&field).is_squarefree(&f)? {
            return Err(Error::InvalidInput("f must be squarefree".into()));
        }
        Ok(Self { field, f, genus: d / 2 - 1 })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn f(&self) -> &P<PrimeField> {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.descriptor().to_json(),
            "f": PolyRing::new(&self.field).to_json(&self.f),
        })
    }

    /// #C(F_{p^m}): affine solutions plus the two points at infinity.
    pub fn count_points(&self, m: usize) -> Result<u64> {
        let p = self.field.p();
        let q = (p as u128).checked_pow(m as u32).filter(|&q| q <= ENUMERATION_BOUND as u128);
        let Some(q) = q else {
            return Err(Error::Resource(format!("F_{p}^{m} exceeds the enumeration bound {ENUMERATION_BOUND}")));
        };
        let k = ExtField::new(p, m)?;
        let rk = PolyRing::new(&k);
        let fk = PolyRing::new(&self.field).map(&self.f, &k, |&c| k.embed(c));
        let half = (q as u64 - 1) / 2;
        let affine: u64 = (0..q as u64)
            .into_par_iter()
            .map(|i| {
                let v = rk.eval(&fk, &k.element(i));
                if k.is_zero(&v) {
                    1
                } else if k.is_one(&k.pow(&v, half)) {
                    2
                } else {
                    0
                }
            })
            .sum();
        Ok(affine + 2)
    }

    /// Coefficients a_0 = 1, a_1, ..., a_2g of the zeta numerator
    /// L(T) = prod (1 - alpha_i T), from the counts over F_p, ..., F_{p^g}.
    pub fn zeta_numerator(&self) -> Result<Vec<i128>> {
        let g = self.genus;
        if g > 3 {
            return Err(Error::Unsupported("zeta numerators are computed for genus at most 3".into()));
        }
        let q = self.field.p() as i128;
        let counts = (1..=g).map(|m| self.count_points(m)).collect::<Result<Vec<u64>>>()?;
        let sums: Vec<i128> = counts
            .iter()
            .enumerate()
            .map(|(i, &n)| q.pow(i as u32 + 1) + 1 - n as i128)
            .collect();
        let mut a = vec![1i128];
        for k in 1..=g {
            let s: i128 = (1..=k).map(|i| sums[i - 1] * a[k - i]).sum();
            debug_assert_eq!(s % k as i128, 0);
            a.push(-s / k as i128);
        }
        for i in (0..g).rev() {
            a.push(q.pow((g - i) as u32) * a[i]);
        }
        Ok(a)
    }

    /// #J(F_p) = L(1).
    pub fn jacobian_order(&self) -> Result<u128> {
        let total: i128 = self.zeta_numerator()?.iter().sum();
        Ok(total as u128)
    }

    /// The 2-torsion of J(F_p) as Frobenius-stable even root subsets modulo
    /// complementation. Root labels follow the sorted roots of the splitting
    /// field, the same labels the pencil modules use.
    pub fn two_torsion(&self) -> Result<Vec<TwoTorsionClass>> {
        let perm = self.root_frobenius()?;
        let d = perm.len();
        Ok(rootsets::stable_classes(&perm).into_iter().map(|mask| TwoTorsionClass { mask, d }).collect())
    }

    /// The permutation i -> j with Frob(root_i) = root_j.
    pub fn root_frobenius(&self) -> Result<Vec<usize>> {
        let s = factor::splitting_field(&self.field, &self.f)?;
        let k = &s.field;
        Ok(s.roots.iter().map(|r| s.roots.iter().position(|x| *x == k.frobenius(r)).unwrap()).collect())
    }

    /// The odd-degree model obtained by sending a rational root to infinity,
    /// if f has one.
    pub fn odd_model(&self) -> Result<OddModel<PrimeField>> {
        OddModel::from_even(&self.field, &self.f)
    }
}

/// #C(F_{p^k}) predicted by the zeta numerator.
pub fn predicted_count(numerator: &[i128], q: u64, k: u32) -> i128 {
    let g2 = numerator.len() - 1;
    let coeff = |i: usize| if i <= g2 { numerator[i] } else { 0 };
    // Newton: s_k = -k a_k - sum_{i<k} a_i s_{k-i}
    let mut s = vec![0i128; k as usize + 1];
    for m in 1..=k as usize {
        let mut v = -(m as i128) * coeff(m);
        for i in 1..m {
            v -= coeff(i) * s[m - i];
        }
        s[m] = v;
    }
    (q as i128).pow(k) + 1 - s[k as usize]
}

/// The class of an even subset of Weierstrass points, canonical modulo the
/// full set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoTorsionClass {
    pub mask: u64,
    pub d: usize,
}

impl TwoTorsionClass {
    pub fn indices(&self) -> Vec<usize> {
        rootsets::to_indices(self.mask)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mask: rootsets::compose(self.mask, other.mask, self.d), d: self.d }
    }
}
