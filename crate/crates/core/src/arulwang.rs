//! The standard soluble pencil on L = k[t]/(f): with beta the class of t,
//! Q1(x, y) is the coefficient of beta^(2n+1) in xy and Q2(x, y) the same
//! coefficient in beta·xy.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Mat, Matrix};
use crate::pencil::Pencil;
use crate::poly::{PolyRing, P};
use crate::quadform::Subspace;

#[derive(Debug, Clone)]
pub struct ArulWangPencil<F: Field> {
    pub pencil: Pencil<F>,
    pub f: P<F>,
    /// Multiplication by beta in the power basis.
    pub t0: Mat<F>,
}

/// Companion matrix of a monic f: e_j maps to e_(j+1), the last basis
/// vector to -(c_0, ..., c_(d-1)).
pub fn multiplication_operator<F: Field>(field: &F, f: &P<F>) -> Result<Mat<F>> {
    let d = match f.degree() {
        Some(d) if d >= 1 && field.is_one(f.lc().unwrap()) => d,
        _ => return Err(Error::InvalidInput("multiplication operator needs a monic polynomial".into())),
    };
    let c = f.coeffs();
    Ok(Matrix::from_fn(d, d, |i, j| {
        if j + 1 < d {
            if i == j + 1 {
                field.one()
            } else {
                field.zero()
            }
        } else {
            field.neg(&c[i])
        }
    }))
}

pub fn build<F: Field>(field: &F, f: &P<F>) -> Result<ArulWangPencil<F>> {
    let r = PolyRing::new(field);
    let d = f.degree().unwrap_or(0);
    if d < 4 || d % 2 == 1 {
        return Err(Error::InvalidInput(format!("need even degree at least 4, got {d}")));
    }
    if !field.is_one(f.lc().unwrap()) {
        return Err(Error::InvalidInput("polynomial must be monic".into()));
    }
    if !r.is_squarefree(f)? {
        return Err(Error::InvalidInput("polynomial must be squarefree".into()));
    }
    // top[k] = coefficient of beta^(d-1) in beta^k mod f, for k < 2d
    let mut top = Vec::with_capacity(2 * d);
    let mut m = r.one();
    let x = r.x();
    for _ in 0..2 * d {
        top.push(r.coeff(&m, d - 1));
        m = r.rem(&r.mul(&m, &x), f);
    }
    let q1 = Matrix::from_fn(d, d, |a, b| top[a + b].clone());
    let q2 = Matrix::from_fn(d, d, |a, b| top[a + b + 1].clone());
    let t0 = multiplication_operator(field, f)?;
    debug_assert_eq!(linalg::mul(field, &q1, &t0), q2);
    let pencil = Pencil::new(field.clone(), d / 2 - 1, q1, q2)?;
    Ok(ArulWangPencil { pencil, f: f.clone(), t0 })
}

impl<F: Field> ArulWangPencil<F> {
    /// span{1, beta, ..., beta^(n-1)}, isotropic for both forms.
    pub fn solubility_witness(&self) -> Subspace<F::Elem> {
        let field = self.pencil.field();
        let d = self.pencil.dim();
        let basis = (0..self.pencil.n())
            .map(|i| (0..d).map(|j| if i == j { field.one() } else { field.zero() }).collect())
            .collect();
        Subspace::from_echelon_unchecked(d, basis)
    }
}
