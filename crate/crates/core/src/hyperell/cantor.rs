//! Mumford representation and Cantor's composition and reduction on the
//! Jacobian of an odd-degree model y^2 = F(u), F monic of degree 2g + 1.
//!
//! Reduced divisors are in bijection with pairs (u, v), u monic of degree at
//! most g, deg v < deg u, u | v^2 - F, so enumerating those pairs counts the
//! Jacobian without going through the zeta function.

use crate::error::{Error, Result};
use crate::factor;
use crate::field::FiniteField;
use crate::poly::{PolyRing, P};

/// Largest number of candidate pairs the enumerators will visit.
pub const PAIR_BOUND: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MumfordDivisor<E> {
    pub u: crate::poly::Poly<E>,
    pub v: crate::poly::Poly<E>,
}

#[derive(Debug, Clone)]
pub struct OddModel<F: FiniteField> {
    field: F,
    rhs: P<F>,
    genus: usize,
}

impl<F: FiniteField> OddModel<F> {
    pub fn new(field: F, rhs: P<F>) -> Result<Self> {
        let r = PolyRing::new(&field);
        let d = rhs.degree().unwrap_or(0);
        if d < 3 || d % 2 == 0 || !field.is_one(rhs.lc().unwrap()) || !r.is_squarefree(&rhs)? {
            return Err(Error::InvalidInput("odd model needs a monic squarefree F of odd degree at least 3".into()));
        }
        Ok(Self { field, rhs, genus: (d - 1) / 2 })
    }

    /// From y^2 = f with f monic of even degree d = 2g + 2 and a root r in the
    /// field: writing f(r + x) = sum b_j x^j and x = b_1 / u gives
    /// Y^2 = sum_j b_j b_1^(j-2) u^(d-j), which is monic of degree d - 1.
    /// Uses the smallest root.
    pub fn from_even(field: &F, f: &P<F>) -> Result<Self> {
        let r = PolyRing::new(field);
        let d = f.degree().unwrap_or(0);
        let Some(root) = factor::roots(field, f).into_iter().next() else {
            return Err(Error::Unsupported(
                "no rational Weierstrass point, so no odd model over the base field".into(),
            ));
        };
        let shifted = r.compose(f, &r.from_coeffs(vec![root, field.one()]));
        let b = shifted.coeffs();
        let b1 = &b[1];
        let b1_inv = field.inv(b1).expect("simple root");
        let mut coeffs = vec![field.zero(); d];
        for (j, bj) in b.iter().enumerate().skip(1) {
            let scale = field.powi(b1, j as i64 - 2).unwrap_or_else(|| b1_inv.clone());
            coeffs[d - j] = field.mul(bj, &scale);
        }
        Self::new(field.clone(), r.from_coeffs(coeffs))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rhs(&self) -> &P<F> {
        &self.rhs
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    fn ring(&self) -> PolyRing<'_, F> {
        PolyRing::new(&self.field)
    }

    pub fn identity(&self) -> MumfordDivisor<F::Elem> {
        let r = self.ring();
        MumfordDivisor { u: r.one(), v: r.zero() }
    }

    pub fn is_valid(&self, d: &MumfordDivisor<F::Elem>) -> bool {
        let r = self.ring();
        let Some(du) = d.u.degree() else { return false };
        self.field.is_one(d.u.lc().unwrap())
            && du <= self.genus
            && d.v.degree().map_or(true, |dv| dv < du)
            && r.rem(&r.sub(&r.mul(&d.v, &d.v), &self.rhs), &d.u).is_zero()
    }

    fn check(&self, d: &MumfordDivisor<F::Elem>) -> Result<()> {
        if self.is_valid(d) {
            Ok(())
        } else {
            Err(Error::InvalidInput("not a reduced Mumford pair for this curve".into()))
        }
    }

    pub fn negate(&self, d: &MumfordDivisor<F::Elem>) -> Result<MumfordDivisor<F::Elem>> {
        self.check(d)?;
        let r = self.ring();
        Ok(MumfordDivisor { u: d.u.clone(), v: r.neg(&d.v) })
    }

    /// Composition without reduction.
    fn compose(&self, a: &MumfordDivisor<F::Elem>, b: &MumfordDivisor<F::Elem>) -> MumfordDivisor<F::Elem> {
        let r = self.ring();
        let (d1, e1, e2) = r.xgcd(&a.u, &b.u);
        let (d, c1, c2) = r.xgcd(&d1, &r.add(&a.v, &b.v));
        let s1 = r.mul(&c1, &e1);
        let s2 = r.mul(&c1, &e2);
        let d2 = r.mul(&d, &d);
        let u = r.div_exact(&r.mul(&a.u, &b.u), &d2).expect("d^2 divides u1 u2");
        let num = r.add(
            &r.add(&r.mul(&r.mul(&s1, &a.u), &b.v), &r.mul(&r.mul(&s2, &b.u), &a.v)),
            &r.mul(&c2, &r.add(&r.mul(&a.v, &b.v), &self.rhs)),
        );
        let v = r.rem(&r.div_exact(&num, &d).expect("d divides the numerator"), &u);
        MumfordDivisor { u, v }
    }

    pub fn reduce(&self, mut d: MumfordDivisor<F::Elem>) -> MumfordDivisor<F::Elem> {
        let r = self.ring();
        while d.u.degree().unwrap() > self.genus {
            let u = r.div_exact(&r.sub(&self.rhs, &r.mul(&d.v, &d.v)), &d.u).expect("u divides F - v^2");
            let u = r.monic(&u);
            let v = r.rem(&r.neg(&d.v), &u);
            d = MumfordDivisor { u, v };
        }
        let v = r.rem(&d.v, &d.u);
        MumfordDivisor { u: d.u, v }
    }

    pub fn add(&self, a: &MumfordDivisor<F::Elem>, b: &MumfordDivisor<F::Elem>) -> Result<MumfordDivisor<F::Elem>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.reduce(self.compose(a, b)))
    }

    /// Every reduced divisor defined over the field, by running through all
    /// monic u of degree at most g and all v of smaller degree.
    pub fn elements(&self) -> Result<Vec<MumfordDivisor<F::Elem>>> {
        let q = self.field.order();
        let g = self.genus as u32;
        match q.checked_pow(2 * g) {
            Some(n) if n <= PAIR_BOUND => {}
            _ => return Err(Error::Resource(format!("{q}^{} Mumford pairs exceed the bound {PAIR_BOUND}", 2 * g))),
        }
        let r = self.ring();
        let mut out = Vec::new();
        for deg in 0..=self.genus {
            let count = q.pow(deg as u32);
            for ui in 0..count {
                let mut uc = self.digits(ui, deg);
                uc.push(self.field.one());
                let u = r.from_coeffs(uc);
                let target = r.rem(&self.rhs, &u);
                for vi in 0..count {
                    let v = r.from_coeffs(self.digits(vi, deg));
                    if r.rem(&r.mul(&v, &v), &u) == target {
                        out.push(MumfordDivisor { u: u.clone(), v });
                    }
                }
            }
        }
        Ok(out)
    }

    fn digits(&self, mut idx: u64, len: usize) -> Vec<F::Elem> {
        let q = self.field.order();
        (0..len)
            .map(|_| {
                let e = self.field.element(idx % q);
                idx /= q;
                e
            })
            .collect()
    }

    /// #J by enumeration.
    pub fn brute_jacobian_order(&self) -> Result<u64> {
        Ok(self.elements()?.len() as u64)
    }

    /// Number of D with 2D = 0, by doubling every element.
    pub fn brute_two_torsion_count(&self) -> Result<u64> {
        let id = self.identity();
        let els = self.elements()?;
        let mut n = 0;
        for d in &els {
            if self.add(d, d)? == id {
                n += 1;
            }
        }
        Ok(n)
    }
}
