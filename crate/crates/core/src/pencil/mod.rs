//! Pencils tQ1 - Q2 of quadratic forms in dimension 2n + 2: discriminant,
//! simultaneous diagonalization over a splitting field, the automorphism
//! group of sign changes and equivalence testing.

pub mod aut;
pub mod equiv;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::factor::{self, Embedding, Splitting};
use crate::field::{ExtField, Field, FiniteField, PrimeField, Rationals};
use crate::linalg::{self, Mat, Matrix};
use crate::poly::{PolyRing, P};

pub use aut::{AutElement, AutGroup, EtaleModel};
pub use equiv::{pencils_equivalent, Equivalence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil<F: Field> {
    field: F,
    n: usize,
    q1: Mat<F>,
    q2: Mat<F>,
}

impl<F: Field> Pencil<F> {
    /// Validates shapes and symmetry, and requires Q1 to be nonsingular so the
    /// discriminant has full degree.
    pub fn new(field: F, n: usize, q1: Mat<F>, q2: Mat<F>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let d = 2 * n + 2;
        for q in [&q1, &q2] {
            if q.rows() != d || q.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: q.rows().max(q.cols()) });
            }
            if !linalg::is_symmetric::<F>(q) {
                return Err(Error::InvalidInput("Gram matrices must be symmetric".into()));
            }
        }
        if field.is_zero(&linalg::det(&field, &q1)) {
            return Err(Error::SingularLeadingForm);
        }
        Ok(Self { field, n, q1, q2 })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn q1(&self) -> &Mat<F> {
        &self.q1
    }

    pub fn q2(&self) -> &Mat<F> {
        &self.q2
    }

    /// The member t Q1 - Q2 at a parameter value.
    pub fn member(&self, t: &F::Elem) -> Mat<F> {
        let f = &self.field;
        linalg::sub(f, &linalg::scale(f, &self.q1, t), &self.q2)
    }

    /// (-1)^(n+1) det(t Q1 - Q2).
    pub fn disc_poly(&self) -> P<F> {
        let f = &self.field;
        let r = PolyRing::new(f);
        let d = self.dim();
        let m = Matrix::from_fn(d, d, |i, j| {
            r.from_coeffs(vec![f.neg(self.q2.get(i, j)), self.q1.get(i, j).clone()])
        });
        let det = linalg::poly_det(f, &m);
        if self.n % 2 == 0 {
            r.neg(&det)
        } else {
            det
        }
    }

    pub fn is_nonsingular(&self) -> bool {
        let f = self.disc_poly();
        f.degree() == Some(self.dim())
            && PolyRing::new(&self.field).is_squarefree(&f).unwrap_or(false)
    }

    pub fn require_nonsingular(&self) -> Result<P<F>> {
        let f = self.disc_poly();
        if f.degree() == Some(self.dim()) && PolyRing::new(&self.field).is_squarefree(&f)? {
            Ok(f)
        } else {
            Err(Error::SingularPencil)
        }
    }

    /// The pencil (Mᵀ Q1 M, Mᵀ Q2 M).
    pub fn transform(&self, m: &Mat<F>) -> Result<Self> {
        let f = &self.field;
        Self::new(f.clone(), self.n, linalg::congruence(f, &self.q1, m), linalg::congruence(f, &self.q2, m))
    }

    pub fn map_field<G: Field>(&self, target: G, phi: impl Fn(&F::Elem) -> G::Elem) -> Result<Pencil<G>> {
        let q1 = self.q1.map(&phi);
        let q2 = self.q2.map(&phi);
        Pencil::new(target, self.n, q1, q2)
    }

    /// The operator u = Q2 Q1^-1, whose characteristic polynomial is
    /// det(t Q1 - Q2) / det(Q1).
    pub fn operator(&self) -> Mat<F> {
        let f = &self.field;
        let inv = linalg::inverse(f, &self.q1).expect("Q1 is nonsingular");
        linalg::mul(f, &self.q2, &inv)
    }
}

/// Roots of the discriminant with a radical vector for each root.
#[derive(Debug, Clone)]
pub struct SplittingData<K: Field> {
    pub field: K,
    /// Degree of `field` over the base field.
    pub degree: usize,
    pub roots: Vec<K::Elem>,
    /// vectors[i] spans the kernel of roots[i] Q1 - Q2 and has leading entry 1.
    pub vectors: Vec<Vec<K::Elem>>,
    /// diag[i] = Q1(vectors[i]).
    pub diag: Vec<K::Elem>,
    /// Root permutation induced by the Frobenius of the base field (identity
    /// over Q).
    pub frobenius: Vec<usize>,
}

impl<K: Field> SplittingData<K> {
    /// Matrix whose columns are the radical vectors.
    pub fn basis_matrix(&self) -> Mat<K> {
        Matrix::from_cols(&self.vectors).expect("vectors of equal length")
    }
}

fn diagonalize_at<K: Field>(
    k: &K,
    q1: &Mat<K>,
    q2: &Mat<K>,
    roots: &[K::Elem],
) -> Result<(Vec<Vec<K::Elem>>, Vec<K::Elem>)> {
    let mut vectors = Vec::with_capacity(roots.len());
    let mut diag = Vec::with_capacity(roots.len());
    for lam in roots {
        let m = linalg::sub(k, &linalg::scale(k, q1, lam), q2);
        let ker = linalg::kernel(k, &m);
        if ker.len() != 1 {
            return Err(Error::SingularPencil);
        }
        let v = linalg::normalize_leading(k, &ker[0]);
        diag.push(linalg::bilinear(k, q1, &v, &v));
        vectors.push(v);
    }
    Ok((vectors, diag))
}

impl Pencil<PrimeField> {
    pub fn splitting(&self) -> Result<Splitting> {
        let f = self.require_nonsingular()?;
        factor::splitting_field(&self.field, &f)
    }

    /// Simultaneous diagonalization over the splitting field of the
    /// discriminant.
    pub fn splitting_data(&self) -> Result<SplittingData<ExtField>> {
        let s = self.splitting()?;
        let k = s.field.clone();
        let q1 = self.q1.map(|&x| k.embed(x));
        let q2 = self.q2.map(|&x| k.embed(x));
        let (vectors, diag) = diagonalize_at(&k, &q1, &q2, &s.roots)?;
        let frobenius = s
            .roots
            .iter()
            .map(|r| s.roots.iter().position(|x| *x == k.frobenius(r)).unwrap())
            .collect();
        Ok(SplittingData { field: k, degree: s.degree, roots: s.roots, vectors, diag, frobenius })
    }

    /// Embeds the pencil in an extension of F_p.
    pub fn over(&self, k: &ExtField) -> Mat2<ExtField> {
        (self.q1.map(|&x| k.embed(x)), self.q2.map(|&x| k.embed(x)))
    }
}

pub type Mat2<F> = (Mat<F>, Mat<F>);

impl SplittingData<ExtField> {
    /// Transports everything along a field embedding, keeping root labels.
    pub fn embed(&self, e: &Embedding) -> SplittingData<ExtField> {
        SplittingData {
            field: e.target.clone(),
            degree: e.target.degree(),
            roots: self.roots.iter().map(|x| e.apply(x)).collect(),
            vectors: self.vectors.iter().map(|v| v.iter().map(|x| e.apply(x)).collect()).collect(),
            diag: self.diag.iter().map(|x| e.apply(x)).collect(),
            frobenius: self.frobenius.clone(),
        }
    }
}

impl Pencil<Rationals> {
    /// Simultaneous diagonalization over Q, available when the discriminant
    /// has only rational roots.
    pub fn splitting_data(&self) -> Result<SplittingData<Rationals>> {
        let f = self.require_nonsingular()?;
        let roots: Vec<BigRational> = factor::rational_roots(&f)?;
        if roots.len() != self.dim() {
            return Err(Error::Unsupported(
                "diagonalization over Q needs a discriminant that splits into rational linear factors".into(),
            ));
        }
        let (vectors, diag) = diagonalize_at(&Rationals, &self.q1, &self.q2, &roots)?;
        let d = roots.len();
        Ok(SplittingData { field: Rationals, degree: 1, roots, vectors, diag, frobenius: (0..d).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arulwang;

    fn sextic() -> Vec<i64> {
        vec![-1, 0, 0, 0, 0, 0, 1]
    }

    #[test]
    fn disc_of_identity_pencil_is_singular() {
        let q = Rationals;
        let id = linalg::identity(&q, 6);
        let p = Pencil::new(q, 2, id.clone(), id).unwrap();
        let f = p.disc_poly();
        let r = PolyRing::new(&q);
        // -(t - 1)^6
        assert_eq!(f, r.neg(&r.pow(&r.from_i64s(&[-1, 1]), 6)));
        assert!(!p.is_nonsingular());
        assert!(p.splitting_data().is_err());
    }

    #[test]
    fn singular_leading_form_rejected() {
        let q = Rationals;
        let z = linalg::zeros(&q, 6, 6);
        assert_eq!(Pencil::new(q, 2, z.clone(), z).unwrap_err(), Error::SingularLeadingForm);
    }

    #[test]
    fn scaling_both_forms_scales_disc() {
        let q = Rationals;
        let r = PolyRing::new(&q);
        let p = arulwang::build(&q, &r.from_i64s(&sextic())).unwrap().pencil;
        let c = q.from_i64(3);
        let scaled = Pencil::new(q, 2, linalg::scale(&q, p.q1(), &c), linalg::scale(&q, p.q2(), &c)).unwrap();
        assert_eq!(scaled.disc_poly(), r.scale(&p.disc_poly(), &q.pow(&c, 6)));
    }

    #[test]
    fn diagonal_pencil_recovers_roots_and_standard_basis() {
        let f = PrimeField::new(7).unwrap();
        let a = [1u64, 2, 3, 4, 5, 6];
        let lam = [6u64, 5, 4, 3, 2, 1];
        let q1 = linalg::diagonal(&f, &a);
        let q2 = linalg::diagonal(&f, &a.iter().zip(&lam).map(|(x, l)| f.mul(x, l)).collect::<Vec<_>>());
        let p = Pencil::new(f, 2, q1, q2).unwrap();
        let s = p.splitting_data().unwrap();
        assert_eq!(s.degree, 1);
        let roots: Vec<u64> = s.roots.iter().map(|x| x[0]).collect();
        assert_eq!(roots, vec![1, 2, 3, 4, 5, 6]);
        for (i, r) in roots.iter().enumerate() {
            let j = lam.iter().position(|l| l == r).unwrap();
            let mut e = vec![vec![0u64]; 6];
            e[j] = vec![1];
            assert_eq!(s.vectors[i], e);
            assert_eq!(s.diag[i], vec![a[j]]);
        }
    }

    #[test]
    fn splitting_invariants_over_f5() {
        let f5 = PrimeField::new(5).unwrap();
        let r = PolyRing::new(&f5);
        let p = arulwang::build(&f5, &r.from_i64s(&sextic())).unwrap().pencil;
        let s = p.splitting_data().unwrap();
        assert_eq!(s.degree, 2);
        let k = &s.field;
        let (q1, q2) = p.over(k);
        for i in 0..6 {
            let m = linalg::sub(k, &linalg::scale(k, &q1, &s.roots[i]), &q2);
            assert!(linalg::mul_vec(k, &m, &s.vectors[i]).iter().all(|x| k.is_zero(x)));
            assert!(!k.is_zero(&s.diag[i]));
            for j in 0..6 {
                if i != j {
                    assert!(k.is_zero(&linalg::bilinear(k, &q1, &s.vectors[i], &s.vectors[j])));
                    assert!(k.is_zero(&linalg::bilinear(k, &q2, &s.vectors[i], &s.vectors[j])));
                }
            }
            // Frobenius permutes the radical vectors along with the roots
            let fv: Vec<Vec<u64>> = s.vectors[i].iter().map(|x| k.frobenius(x)).collect();
            assert_eq!(fv, s.vectors[s.frobenius[i]]);
        }
        let mut orbit_sizes: Vec<u32> = crate::rootsets::orbits(&s.frobenius).iter().map(|o| o.count_ones()).collect();
        orbit_sizes.sort();
        assert_eq!(orbit_sizes, vec![1, 1, 2, 2]);
    }
}
