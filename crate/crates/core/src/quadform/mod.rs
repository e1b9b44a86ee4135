//! Quadratic forms given by symmetric Gram matrices: evaluation,
//! diagonalization by congruence, radicals, Witt indices over finite fields
//! and real signatures. Local invariants over Q_p and R live in [`local`].

pub mod local;

use num_traits::{Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Field, FiniteField, Rationals};
use crate::linalg::{self, Mat, Matrix};

/// A linear subspace stored by its reduced row echelon basis, so equal
/// subspaces have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace<E> {
    ambient: usize,
    basis: Vec<Vec<E>>,
}

impl<E: Clone> Subspace<E> {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.basis
    }

    /// Wraps rows already in reduced echelon form with no zero rows.
    pub fn from_echelon_unchecked(ambient: usize, basis: Vec<Vec<E>>) -> Self {
        Self { ambient, basis }
    }
}

impl<E: Clone + Eq> Subspace<E> {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn span<F: Field<Elem = E>>(f: &F, ambient: usize, vectors: &[Vec<E>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: v.len() });
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let (m, piv) = linalg::rref(f, &Matrix::from_rows(vectors.to_vec())?);
        Ok(Self { ambient, basis: m.to_rows().into_iter().take(piv.len()).collect() })
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(f, &Matrix::from_rows(rows).unwrap()) == self.dim()
    }

    pub fn to_json<F: Field<Elem = E>>(&self, f: &F) -> Value {
        Value::Array(
            self.basis
                .iter()
                .map(|r| Value::Array(r.iter().map(|x| f.elem_to_json(x)).collect()))
                .collect(),
        )
    }
}

fn check_form<F: Field>(g: &Mat<F>) -> Result<()> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: g.cols() });
    }
    if !linalg::is_symmetric::<F>(g) {
        return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
    }
    Ok(())
}

/// vᵀ G v.
pub fn evaluate<F: Field>(f: &F, g: &Mat<F>, v: &[F::Elem]) -> Result<F::Elem> {
    if v.len() != g.rows() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: v.len() });
    }
    Ok(linalg::bilinear(f, g, v, v))
}

/// Returns (P, d) with Pᵀ G P = diag(d) and P invertible.
pub fn diagonalize_congruence<F: Field>(f: &F, g: &Mat<F>) -> Result<(Mat<F>, Vec<F::Elem>)> {
    check_form::<F>(g)?;
    let n = g.rows();
    let mut a = g.clone();
    let mut p = linalg::identity(f, n);
    // e_i <- e_i + c e_j, applied as a congruence
    let add_multiple = |a: &mut Mat<F>, p: &mut Mat<F>, i: usize, j: usize, c: &F::Elem| {
        for k in 0..n {
            let v = f.add(a.get(k, i), &f.mul(c, a.get(k, j)));
            a.set(k, i, v);
        }
        for k in 0..n {
            let v = f.add(a.get(i, k), &f.mul(c, a.get(j, k)));
            a.set(i, k, v);
        }
        for k in 0..n {
            let v = f.add(p.get(k, i), &f.mul(c, p.get(k, j)));
            p.set(k, i, v);
        }
    };
    for i in 0..n {
        if f.is_zero(a.get(i, i)) {
            if let Some(j) = (i + 1..n).find(|&j| !f.is_zero(a.get(j, j))) {
                a.swap_rows(i, j);
                a = a.transpose();
                a.swap_rows(i, j);
                p = p.transpose();
                p.swap_rows(i, j);
                p = p.transpose();
            } else if let Some(j) = (i + 1..n).find(|&j| !f.is_zero(a.get(i, j))) {
                // all later diagonal entries vanish, so the new one is 2 a_ij
                add_multiple(&mut a, &mut p, i, j, &f.one());
            } else {
                continue;
            }
        }
        let inv = f.inv(a.get(i, i)).unwrap();
        for j in i + 1..n {
            let c = f.neg(&f.mul(a.get(i, j), &inv));
            if !f.is_zero(&c) {
                add_multiple(&mut a, &mut p, j, i, &c);
            }
        }
    }
    let d = (0..n).map(|i| a.get(i, i).clone()).collect();
    Ok((p, d))
}

/// Kernel of the Gram matrix.
pub fn radical<F: Field>(f: &F, g: &Mat<F>) -> Result<Subspace<F::Elem>> {
    check_form::<F>(g)?;
    Ok(Subspace { ambient: g.rows(), basis: linalg::kernel(f, g) })
}

pub fn is_nonsingular<F: Field>(f: &F, g: &Mat<F>) -> bool {
    g.is_square() && !f.is_zero(&linalg::det(f, g))
}

/// Decomposition of a nonsingular form over F_q as an orthogonal sum of
/// hyperbolic planes and an anisotropic part.
#[derive(Debug, Clone)]
pub struct WittDecomposition<E> {
    pub index: usize,
    /// One isotropic vector from each hyperbolic plane; their span is a
    /// maximal totally isotropic subspace.
    pub isotropic: Vec<Vec<E>>,
    /// The partner vectors: isotropic, pairing nontrivially with the
    /// corresponding entry of `isotropic` and orthogonal to the others.
    pub partners: Vec<Vec<E>>,
    /// Orthogonal basis of the anisotropic kernel (at most two vectors).
    pub anisotropic: Vec<Vec<E>>,
}

/// Splits off hyperbolic planes one at a time. Isotropic vectors are found
/// in three-dimensional diagonal pieces, which always contain one over a
/// finite field, by a deterministic scan.
pub fn witt_decomposition<F: FiniteField>(f: &F, g: &Mat<F>) -> Result<WittDecomposition<F::Elem>> {
    check_form::<F>(g)?;
    if !is_nonsingular(f, g) {
        return Err(Error::InvalidInput("Witt index requires a nonsingular form".into()));
    }
    let n = g.rows();
    let (p, _) = diagonalize_congruence(f, g)?;
    // work with an orthogonal basis in original coordinates
    let mut pool: Vec<Vec<F::Elem>> = (0..n).map(|j| p.col(j)).collect();
    let q = |v: &[F::Elem]| linalg::bilinear(f, g, v, v);
    let b = |v: &[F::Elem], w: &[F::Elem]| linalg::bilinear(f, g, v, w);
    let comb = |cs: &[F::Elem], vs: &[&Vec<F::Elem>]| -> Vec<F::Elem> {
        (0..n)
            .map(|k| {
                let mut acc = f.zero();
                for (c, v) in cs.iter().zip(vs) {
                    acc = f.add(&acc, &f.mul(c, &v[k]));
                }
                acc
            })
            .collect()
    };
    let mut out = WittDecomposition { index: 0, isotropic: vec![], partners: vec![], anisotropic: vec![] };
    loop {
        let k = pool.len();
        if k < 2 {
            break;
        }
        let take = k.min(3);
        let vs: Vec<Vec<F::Elem>> = pool.drain(k - take..).collect();
        let refs: Vec<&Vec<F::Elem>> = vs.iter().collect();
        let a: Vec<F::Elem> = vs.iter().map(|v| q(v)).collect();
        // isotropic vector in the span of the chosen orthogonal vectors
        let iso = if take == 2 {
            let r = f.div(&f.neg(&a[1]), &a[0]).unwrap();
            f.sqrt(&r).map(|x| comb(&[x, f.one()], &refs))
        } else {
            let mut found = None;
            for y in f.elements() {
                let rhs = f.add(&f.mul(&a[1], &f.square(&y)), &a[2]);
                let r = f.div(&f.neg(&rhs), &a[0]).unwrap();
                if let Some(x) = f.sqrt(&r) {
                    found = Some(comb(&[x, y, f.one()], &refs));
                    break;
                }
            }
            found
        };
        let Some(v) = iso else {
            // anisotropic binary form: nothing left to split
            pool.extend(vs);
            break;
        };
        let w0 = refs
            .iter()
            .find(|w| !f.is_zero(&b(&v, w)))
            .expect("nonsingular span pairs with every nonzero vector");
        let bvw = b(&v, w0);
        let c = f.neg(&f.div(&q(w0), &f.add(&bvw, &bvw)).unwrap());
        let w = comb(&[f.one(), c], &[w0, &v]);
        if take == 3 {
            // orthogonal complement of the plane inside the 3-space
            let m = Matrix::from_rows(vec![
                refs.iter().map(|x| b(&v, x)).collect(),
                refs.iter().map(|x| b(&w, x)).collect(),
            ])
            .unwrap();
            let ker = linalg::kernel(f, &m);
            pool.push(comb(&ker[0], &refs));
        }
        out.isotropic.push(v);
        out.partners.push(w);
        out.index += 1;
    }
    out.anisotropic = pool;
    Ok(out)
}

pub fn witt_index_fq<F: FiniteField>(f: &F, g: &Mat<F>) -> Result<usize> {
    Ok(witt_decomposition(f, g)?.index)
}

pub fn is_hyperbolic_fq<F: FiniteField>(f: &F, g: &Mat<F>) -> Result<bool> {
    let w = witt_index_fq(f, g)?;
    Ok(g.rows() % 2 == 0 && w == g.rows() / 2)
}

/// Inertia of a real symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    /// Dimension of the radical.
    pub zero: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.positive == 0 || self.negative == 0)
    }
}

pub fn signature_r(g: &Mat<Rationals>) -> Result<Signature> {
    let (_, d) = diagonalize_congruence(&Rationals, g)?;
    let mut s = Signature { positive: 0, negative: 0, zero: 0 };
    for x in d {
        if x.is_zero() {
            s.zero += 1;
        } else if x.is_positive() {
            s.positive += 1;
        } else {
            s.negative += 1;
        }
    }
    Ok(s)
}
