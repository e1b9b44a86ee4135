//! Equivalence of pencils over F_{p^e}: invertible M and a scalar lambda
//! with Mᵀ Q1 M = lambda Q1' and Mᵀ Q2 M = lambda Q2'.
//!
//! Such an M carries the radical line of each root of the discriminant for
//! P' onto the radical line of the same root for P, so with both splittings
//! labelled by the same sorted roots the alignment is forced and only the
//! diagonal rescalings c_i remain: c_i^2 d_i = lambda d'_i, subject to the
//! Frobenius compatibility c_(pi^e(i)) = phi^e(c_i) that makes M rational.

use num_integer::Integer;

use super::{Pencil, SplittingData};
use crate::error::{Error, Result};
use crate::factor::Embedding;
use crate::field::{ExtField, Field, FiniteField, PrimeField};
use crate::linalg::{self, Mat};
use crate::poly::PolyRing;
use crate::rootsets;

#[derive(Debug, Clone)]
pub struct Equivalence {
    /// The field F_{p^e} the transform is defined over.
    pub field: ExtField,
    pub lambda: Vec<u64>,
    pub matrix: Mat<ExtField>,
}

impl Equivalence {
    /// The transform over F_p, when e = 1.
    pub fn over_base(&self) -> Option<(u64, Mat<PrimeField>)> {
        if self.field.degree() != 1 {
            return None;
        }
        Some((self.lambda[0], self.matrix.map(|x| x[0])))
    }

    /// Re-checks the defining identities from scratch.
    pub fn verify(&self, p: &Pencil<PrimeField>, p2: &Pencil<PrimeField>) -> bool {
        let k = &self.field;
        let (a1, a2) = p.over(k);
        let (b1, b2) = p2.over(k);
        !k.is_zero(&linalg::det(k, &self.matrix))
            && linalg::congruence(k, &a1, &self.matrix) == linalg::scale(k, &b1, &self.lambda)
            && linalg::congruence(k, &a2, &self.matrix) == linalg::scale(k, &b2, &self.lambda)
    }
}

/// Searches for an equivalence over F_{p^e}. `Ok(None)` is a proof of
/// inequivalence, including when the discriminants differ by more than a
/// square factor.
pub fn pencils_equivalent(
    p: &Pencil<PrimeField>,
    p2: &Pencil<PrimeField>,
    e: usize,
) -> Result<Option<Equivalence>> {
    if p.n() != p2.n() {
        return Ok(None);
    }
    if p.field() != p2.field() {
        return Err(Error::InvalidInput("pencils over different fields".into()));
    }
    if e == 0 {
        return Err(Error::InvalidInput("extension degree must be positive".into()));
    }
    let fp = *p.field();
    let prime = fp.p();
    let f = p.require_nonsingular()?;
    let f2 = p2.require_nonsingular()?;
    let r = PolyRing::new(&fp);
    let c = fp.div(f2.lc().unwrap(), f.lc().unwrap()).unwrap();
    if r.scale(&f, &c) != f2 {
        return Ok(None);
    }
    let fe = ExtField::new(prime, e)?;
    if !fe.is_square(&fe.embed(c)) {
        return Ok(None);
    }
    let s1 = p.splitting_data()?;
    let s2 = p2.splitting_data()?;
    debug_assert_eq!(s1.roots, s2.roots);
    let level = 2 * s1.degree.lcm(&e);
    let w = ExtField::new(prime, level)?;
    let into_w = Embedding::new(&s1.field, &w)?;
    let s1 = s1.embed(&into_w);
    let s2 = s2.embed(&into_w);
    let fe_into_w = Embedding::new(&fe, &w)?;
    let perm_e = rootsets::perm_power(&s1.frobenius, e);
    for lam in [fe.one(), fe.nonsquare()] {
        let lam_w = fe_into_w.apply(&lam);
        let Some(scales) = diagonal_scales(&w, &s1, &s2, &lam_w, &perm_e, e) else {
            continue;
        };
        let v1 = s1.basis_matrix();
        let v2inv = linalg::inverse(&w, &s2.basis_matrix()).expect("radical vectors form a basis");
        let m_w = linalg::mul(&w, &linalg::mul(&w, &v1, &linalg::diagonal(&w, &scales)), &v2inv);
        let entries: Option<Vec<Vec<Vec<u64>>>> = m_w
            .to_rows()
            .iter()
            .map(|row| row.iter().map(|x| fe_into_w.preimage(x)).collect())
            .collect();
        let matrix = linalg::Matrix::from_rows(entries.ok_or_else(|| {
            Error::InvalidInput("internal: equivalence transform is not rational".into())
        })?)?;
        let eq = Equivalence { field: fe.clone(), lambda: lam, matrix };
        debug_assert!(eq.verify(p, p2));
        return Ok(Some(eq));
    }
    Ok(None)
}

/// Solves c_i^2 d_i = lambda d'_i orbit by orbit of the e-th Frobenius
/// power, propagating the choice at the orbit's first index by Frobenius.
fn diagonal_scales(
    w: &ExtField,
    s1: &SplittingData<ExtField>,
    s2: &SplittingData<ExtField>,
    lam: &Vec<u64>,
    perm_e: &[usize],
    e: usize,
) -> Option<Vec<Vec<u64>>> {
    let d = s1.roots.len();
    let mut c: Vec<Option<Vec<u64>>> = vec![None; d];
    for orbit in rootsets::orbits(perm_e) {
        let i0 = orbit.trailing_zeros() as usize;
        let len = orbit.count_ones() as usize;
        let target = w.div(&w.mul(lam, &s2.diag[i0]), &s1.diag[i0]).unwrap();
        let root = w.sqrt(&target).expect("elements of the half-level field are squares");
        if w.frobenius_power(&root, e * len) != root {
            return None;
        }
        let mut i = i0;
        let mut val = root;
        for _ in 0..len {
            c[i] = Some(val.clone());
            val = w.frobenius_power(&val, e);
            i = perm_e[i];
        }
    }
    Some(c.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arulwang;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn aw(p: u64, f: &[i64]) -> Pencil<PrimeField> {
        let fp = PrimeField::new(p).unwrap();
        arulwang::build(&fp, &PolyRing::new(&fp).from_i64s(f)).unwrap().pencil
    }

    fn random_invertible(fp: &PrimeField, d: usize, rng: &mut ChaCha8Rng) -> Mat<PrimeField> {
        loop {
            let m = linalg::Matrix::from_fn(d, d, |_, _| rng.gen_range(0..fp.p()));
            if linalg::det(fp, &m) != 0 {
                return m;
            }
        }
    }

    #[test]
    fn self_equivalence() {
        let p = aw(7, &[-1, 0, 0, 0, 0, 0, 1]);
        let eq = pencils_equivalent(&p, &p, 1).unwrap().unwrap();
        let (lam, m) = eq.over_base().unwrap();
        let fp = *p.field();
        assert!(eq.verify(&p, &p));
        assert_eq!(&linalg::congruence(&fp, p.q1(), &m), &linalg::scale(&fp, p.q1(), &lam));
    }

    #[test]
    fn recovers_random_change_of_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (prime, f) in [(7u64, vec![-1i64, 0, 0, 0, 0, 0, 1]), (5, vec![-1, 0, 0, 0, 0, 0, 1]), (5, vec![2, 1, 0, 0, 1])] {
            let p = aw(prime, &f);
            let fp = *p.field();
            for _ in 0..5 {
                let m = random_invertible(&fp, p.dim(), &mut rng);
                let p2 = p.transform(&m).unwrap();
                let eq = pencils_equivalent(&p, &p2, 1).unwrap().expect("conjugate pencils are equivalent");
                assert!(eq.verify(&p, &p2));
            }
        }
    }

    #[test]
    fn discriminant_mismatch_is_inequivalent() {
        let p = aw(7, &[-1, 0, 0, 0, 0, 0, 1]);
        let q = aw(7, &[-2, 0, 0, 0, 0, 0, 1]);
        assert!(pencils_equivalent(&p, &q, 1).unwrap().is_none());
    }

    #[test]
    fn nonsquare_scaling_of_the_discriminant() {
        // scaling Q1 and Q2 by a nonsquare c multiplies f by c^6, a square;
        // scaling only the basis vector e_0 by c multiplies f by c^2.
        let p = aw(7, &[-1, 0, 0, 0, 0, 0, 1]);
        let fp = *p.field();
        let mut m = linalg::identity(&fp, 6);
        m.set(0, 0, 3);
        let p2 = p.transform(&m).unwrap();
        assert!(pencils_equivalent(&p, &p2, 1).unwrap().is_some());
        let scaled = Pencil::new(fp, 2, linalg::scale(&fp, p.q1(), &3), linalg::scale(&fp, p.q2(), &3)).unwrap();
        assert!(pencils_equivalent(&p, &scaled, 1).unwrap().is_some());
    }
}
