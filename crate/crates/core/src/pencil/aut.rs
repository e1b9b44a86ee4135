//! The automorphism group of a nonsingular pencil: sign changes on the
//! radical lines, modulo -1, in two models (root subsets with matrix lifts,
//! and the étale algebra generated by Q2 Q1^-1).

use num_integer::Integer;
use serde::Serialize;

use super::{Pencil, SplittingData};
use crate::error::{Error, Result};
use crate::factor::{self, Embedding};
use crate::field::{ExtField, Field, FiniteField, PrimeField};
use crate::linalg::{self, Mat};
use crate::poly::P;
use crate::rootsets;

/// An automorphism given by the even set of radical lines it negates,
/// stored as the canonical member of {S, complement(S)}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AutElement {
    mask: u64,
    d: usize,
}

impl AutElement {
    pub fn identity(d: usize) -> Self {
        Self { mask: 0, d }
    }

    pub fn from_mask(mask: u64, d: usize) -> Result<Self> {
        if mask >> d != 0 {
            return Err(Error::InvalidInput(format!("subset mask {mask:#b} exceeds {d} roots")));
        }
        if !rootsets::is_even(mask) {
            return Err(Error::InvalidInput("automorphisms come from even subsets of roots".into()));
        }
        Ok(Self { mask: rootsets::canonical(mask, d), d })
    }

    pub fn from_indices(indices: &[usize], d: usize) -> Result<Self> {
        Self::from_mask(rootsets::from_indices(indices, d)?, d)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn indices(&self) -> Vec<usize> {
        rootsets::to_indices(self.mask)
    }

    pub fn is_identity(&self) -> bool {
        self.mask == 0
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        Self { mask: rootsets::compose(self.mask, other.mask, self.d), d: self.d }
    }

    /// The Frobenius image, for a root permutation.
    pub fn conjugate(&self, perm: &[usize]) -> Self {
        Self { mask: rootsets::canonical(rootsets::apply_perm(self.mask, perm), self.d), d: self.d }
    }

    /// Sign vector (+1 / -1 as field elements) of this representative.
    pub fn signs<K: Field>(&self, k: &K) -> Vec<K::Elem> {
        (0..self.d)
            .map(|i| if self.mask >> i & 1 == 1 { k.from_i64(-1) } else { k.one() })
            .collect()
    }

    /// The matrix V diag(eps) V^-1 acting on column vectors, where V has the
    /// radical vectors as columns. It preserves both forms and has
    /// determinant 1.
    pub fn lift<K: Field>(&self, split: &SplittingData<K>) -> Mat<K> {
        let k = &split.field;
        let v = split.basis_matrix();
        let vinv = linalg::inverse(k, &v).expect("radical vectors form a basis");
        linalg::mul(k, &linalg::mul(k, &v, &linalg::diagonal(k, &self.signs(k))), &vinv)
    }
}

/// The rational points of the automorphism group with their matrix lifts.
#[derive(Debug, Clone)]
pub struct AutGroup<K: Field> {
    /// Field the lifts are written over.
    pub field: K,
    pub elements: Vec<AutElement>,
    pub lifts: Vec<Mat<K>>,
}

impl<K: Field> AutGroup<K> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// The class of a 2-torsion point, written as an even subset of Weierstrass
/// indices, mapped to the automorphism negating the same radical lines. The
/// generator [P_d - P_i] goes to the subset {i, d}.
pub fn theta(class_indices: &[usize], d: usize) -> Result<AutElement> {
    AutElement::from_indices(class_indices, d)
}

fn lift_is_fixed(k: &ExtField, t: &Mat<ExtField>, e: usize) -> bool {
    (0..t.rows()).all(|i| (0..t.cols()).all(|j| k.frobenius_power(t.get(i, j), e) == *t.get(i, j)))
}

impl Pencil<PrimeField> {
    /// Automorphisms defined over F_p: every even root subset is lifted to a
    /// matrix over the splitting field, and kept when the lift has entries in
    /// F_p.
    pub fn aut_plus(&self) -> Result<AutGroup<PrimeField>> {
        let g = self.aut_plus_over(1)?;
        let k = g.field;
        let lifts = g
            .lifts
            .iter()
            .map(|t| t.map(|x| k.to_prime(x).expect("fixed by Frobenius")))
            .collect();
        Ok(AutGroup { field: *self.field(), elements: g.elements, lifts })
    }

    /// Automorphisms defined over F_{p^e}. Lifts are written over the
    /// compositum of F_{p^e} and the splitting field.
    pub fn aut_plus_over(&self, e: usize) -> Result<AutGroup<ExtField>> {
        if e == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let split = self.splitting_data()?;
        let level = split.degree.lcm(&e);
        let w = ExtField::new(self.field().p(), level)?;
        let split = split.embed(&Embedding::new(&split.field, &w)?);
        let d = self.dim();
        let mut elements = Vec::new();
        let mut lifts = Vec::new();
        for mask in 0..1u64 << (d - 1) {
            if !rootsets::is_even(mask) {
                continue;
            }
            let a = AutElement { mask, d };
            let t = a.lift(&split);
            if lift_is_fixed(&w, &t, e) {
                elements.push(a);
                lifts.push(t);
            }
        }
        Ok(AutGroup { field: w, elements, lifts })
    }

    pub fn etale_model(&self) -> Result<EtaleModel> {
        let f = self.require_nonsingular()?;
        let fp = *self.field();
        let u = self.operator();
        let charpoly = linalg::charpoly(&fp, &u);
        let components = factor::factor(&fp, &f)?;
        Ok(EtaleModel { n: self.n(), field: fp, operator: u, charpoly, components })
    }
}

/// The étale algebra k[u] with u = Q2 Q1^-1, as a product of the fields
/// F_p[t]/(f_j) over the irreducible factors f_j of the discriminant.
#[derive(Debug, Clone)]
pub struct EtaleModel {
    pub n: usize,
    pub field: PrimeField,
    pub operator: Mat<PrimeField>,
    /// Monic characteristic polynomial of the operator.
    pub charpoly: P<PrimeField>,
    pub components: Vec<(P<PrimeField>, u32)>,
}

impl EtaleModel {
    /// Number of units alpha of k[u] with alpha^2 = lambda a nonzero scalar
    /// and norm lambda^(n+1), divided by the scalars. This is the order of the
    /// group of determinant-one similitudes modulo scalars.
    pub fn similitude_class_count(&self) -> Result<u64> {
        let fp = self.field;
        let p = fp.p();
        let comps: Vec<ExtField> = self
            .components
            .iter()
            .map(|(g, _)| ExtField::with_modulus(p, g.coeffs().to_vec()))
            .collect::<Result<_>>()?;
        let mut total = 0u64;
        for lam in 1..p {
            // square roots of lambda in each component, with their norms
            let mut choices: Vec<[u64; 2]> = Vec::new();
            let mut solvable = true;
            for c in &comps {
                match c.sqrt(&c.embed(lam)) {
                    None => {
                        solvable = false;
                        break;
                    }
                    Some(s) => {
                        let deg = c.degree();
                        let mut norm = c.one();
                        for i in 0..deg {
                            norm = c.mul(&norm, &c.frobenius_power(&s, i));
                        }
                        let ns = c.to_prime(&norm).expect("norms lie in F_p");
                        let neg = if deg % 2 == 0 { ns } else { fp.neg(&ns) };
                        choices.push([ns, neg]);
                    }
                }
            }
            if !solvable {
                continue;
            }
            let target = fp.pow(&lam, self.n as u64 + 1);
            let r = choices.len();
            for signs in 0..1u64 << r {
                let prod = (0..r).fold(1, |acc, j| fp.mul(&acc, &choices[j][(signs >> j & 1) as usize]));
                if prod == target {
                    total += 1;
                }
            }
        }
        Ok(total / (p - 1))
    }
}
