//! Dense matrices over an exact field: products, echelon forms, kernels,
//! determinants and characteristic polynomials.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{PolyRing, P};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Self { rows, cols, data: vec![e; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_cols(cols: &[Vec<E>]) -> Result<Self> {
        Ok(Self::from_rows(cols.to_vec())?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, e: E) {
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<G: Clone>(&self, f: impl Fn(&E) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

pub type Mat<F> = Matrix<<F as Field>::Elem>;

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Mat<F> {
    Matrix::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F> {
    Matrix::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
}

pub fn diagonal<F: Field>(f: &F, d: &[F::Elem]) -> Mat<F> {
    Matrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i].clone() } else { f.zero() })
}

pub fn from_i64<F: Field>(f: &F, rows: &[Vec<i64>]) -> Mat<F> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect())
        .expect("rectangular input")
}

pub fn mul<F: Field>(f: &F, a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    assert_eq!(a.cols, b.rows, "matrix product shape mismatch");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if !f.is_zero(y) {
                    let v = f.add(out.get(i, j), &f.mul(x, y));
                    out.set(i, j, v);
                }
            }
        }
    }
    out
}

pub fn mul_vec<F: Field>(f: &F, a: &Mat<F>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len());
    (0..a.rows).map(|i| f.dot(a.row(i), v)).collect()
}

pub fn add<F: Field>(f: &F, a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_fn(a.rows, a.cols, |i, j| f.add(a.get(i, j), b.get(i, j)))
}

pub fn sub<F: Field>(f: &F, a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Matrix::from_fn(a.rows, a.cols, |i, j| f.sub(a.get(i, j), b.get(i, j)))
}

pub fn scale<F: Field>(f: &F, a: &Mat<F>, c: &F::Elem) -> Mat<F> {
    a.map(|x| f.mul(x, c))
}

/// vᵀ A w.
pub fn bilinear<F: Field>(f: &F, a: &Mat<F>, v: &[F::Elem], w: &[F::Elem]) -> F::Elem {
    f.dot(v, &mul_vec(f, a, w))
}

/// Mᵀ A M.
pub fn congruence<F: Field>(f: &F, a: &Mat<F>, m: &Mat<F>) -> Mat<F> {
    mul(f, &mul(f, &m.transpose(), a), m)
}

pub fn is_zero<F: Field>(f: &F, a: &Mat<F>) -> bool {
    a.data.iter().all(|x| f.is_zero(x))
}

pub fn is_symmetric<F: Field>(a: &Mat<F>) -> bool {
    a.is_square() && (0..a.rows).all(|i| (0..i).all(|j| a.get(i, j) == a.get(j, i)))
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(f: &F, a: &Mat<F>) -> (Mat<F>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
            continue;
        };
        m.swap_rows(p, r);
        let inv = f.inv(m.get(r, c)).unwrap();
        for j in c..m.cols {
            let v = f.mul(m.get(r, j), &inv);
            m.set(r, j, v);
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let factor = m.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..m.cols {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank<F: Field>(f: &F, a: &Mat<F>) -> usize {
    rref(f, a).1.len()
}

/// Canonical basis of the right kernel {x : A x = 0}: one vector per free
/// column, with a 1 in that column. The returned rows are themselves in
/// reduced echelon form after [`rref`] of the basis.
pub fn kernel<F: Field>(f: &F, a: &Mat<F>) -> Vec<Vec<F::Elem>> {
    let (m, pivots) = rref(f, a);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<F::Elem>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); a.cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, fc));
            }
            v
        })
        .collect();
    if basis.is_empty() {
        return basis;
    }
    let (e, piv) = rref(f, &Matrix::from_rows(basis).unwrap());
    e.to_rows().into_iter().take(piv.len()).collect()
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_leading<F: Field>(f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
    match v.iter().find(|x| !f.is_zero(x)) {
        None => v.to_vec(),
        Some(lead) => {
            let inv = f.inv(lead).unwrap();
            v.iter().map(|x| f.mul(x, &inv)).collect()
        }
    }
}

pub fn det<F: Field>(f: &F, a: &Mat<F>) -> F::Elem {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
            return f.zero();
        };
        if p != c {
            m.swap_rows(p, c);
            d = f.neg(&d);
        }
        let pivot = m.get(c, c).clone();
        d = f.mul(&d, &pivot);
        let inv = f.inv(&pivot).unwrap();
        for i in c + 1..n {
            let factor = f.mul(m.get(i, c), &inv);
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..n {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                m.set(i, j, v);
            }
        }
    }
    d
}

pub fn inverse<F: Field>(f: &F, a: &Mat<F>) -> Option<Mat<F>> {
    assert!(a.is_square());
    let n = a.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let (m, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Some(m.submatrix(&rows, &cols))
}

/// Characteristic polynomial det(xI - A) via reduction to Hessenberg form.
pub fn charpoly<F: Field>(f: &F, a: &Mat<F>) -> P<F> {
    assert!(a.is_square());
    let n = a.rows;
    let mut h = a.clone();
    // similarity reduction to upper Hessenberg form
    for c in 0..n.saturating_sub(2) {
        let Some(p) = (c + 1..n).find(|&i| !f.is_zero(h.get(i, c))) else {
            continue;
        };
        if p != c + 1 {
            h.swap_rows(p, c + 1);
            for i in 0..n {
                let (x, y) = (h.get(i, p).clone(), h.get(i, c + 1).clone());
                h.set(i, p, y);
                h.set(i, c + 1, x);
            }
        }
        let inv = f.inv(h.get(c + 1, c)).unwrap();
        for i in c + 2..n {
            let t = f.mul(h.get(i, c), &inv);
            if f.is_zero(&t) {
                continue;
            }
            for j in 0..n {
                let v = f.sub(h.get(i, j), &f.mul(&t, h.get(c + 1, j)));
                h.set(i, j, v);
            }
            for k in 0..n {
                let v = f.add(h.get(k, c + 1), &f.mul(&t, h.get(k, i)));
                h.set(k, c + 1, v);
            }
        }
    }
    // recurrence on leading principal minors
    let r = PolyRing::new(f);
    let mut ps: Vec<P<F>> = vec![r.one()];
    for m in 0..n {
        let lin = r.from_coeffs(vec![f.neg(h.get(m, m)), f.one()]);
        let mut next = r.mul(&lin, &ps[m]);
        let mut prod = f.one();
        for i in (0..m).rev() {
            prod = f.mul(&prod, h.get(i + 1, i));
            let term = f.mul(&prod, h.get(i, m));
            next = r.sub(&next, &r.scale(&ps[i], &term));
        }
        ps.push(next);
    }
    ps.pop().unwrap()
}

/// Determinant of a matrix of polynomials by fraction-free Bareiss
/// elimination.
pub fn poly_det<F: Field>(f: &F, a: &Matrix<P<F>>) -> P<F> {
    assert!(a.is_square());
    let r = PolyRing::new(f);
    let n = a.rows;
    if n == 0 {
        return r.one();
    }
    let mut m = a.clone();
    let mut sign = true;
    let mut prev = r.one();
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                return r.zero();
            };
            m.swap_rows(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = r.sub(&r.mul(m.get(i, j), m.get(k, k)), &r.mul(m.get(i, k), m.get(k, j)));
                let v = r.div_exact(&num, &prev).expect("Bareiss divisions are exact");
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    let d = m.get(n - 1, n - 1).clone();
    if sign {
        d
    } else {
        r.neg(&d)
    }
}

pub fn to_json<F: Field>(f: &F, a: &Mat<F>) -> Value {
    Value::Array(
        (0..a.rows)
            .map(|i| Value::Array(a.row(i).iter().map(|x| f.elem_to_json(x)).collect()))
            .collect(),
    )
}

pub fn from_json<F: Field>(f: &F, v: &Value) -> Result<Mat<F>> {
    let bad = || Error::InvalidInput(format!("expected a nested list matrix: {v}"));
    let rows = v.as_array().ok_or_else(bad)?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| f.elem_from_json(x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;

    fn det_permutation_expansion(f: &PrimeField, a: &Mat<PrimeField>) -> u64 {
        let n = a.rows();
        let mut idx: Vec<usize> = (0..n).collect();
        let mut total = 0;
        permute(&mut idx, 0, &mut |perm| {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let mut term = 1;
            for (i, &pi) in perm.iter().enumerate() {
                term = f.mul(&term, a.get(i, pi));
            }
            if inversions % 2 == 1 {
                term = f.neg(&term);
            }
            total = f.add(&total, &term);
        });
        total
    }

    fn permute(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            visit(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, visit);
            v.swap(k, i);
        }
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
        prop::collection::vec(prop::collection::vec(0u64..7, n), n)
    }

    proptest! {
        #[test]
        fn det_matches_leibniz(rows in (1usize..6).prop_flat_map(arb_matrix)) {
            let f = PrimeField::new(7).unwrap();
            let a = Matrix::from_rows(rows).unwrap();
            prop_assert_eq!(det(&f, &a), det_permutation_expansion(&f, &a));
        }

        #[test]
        fn charpoly_routes_agree(rows in (1usize..6).prop_flat_map(arb_matrix)) {
            let f = PrimeField::new(7).unwrap();
            let r = PolyRing::new(&f);
            let a = Matrix::from_rows(rows).unwrap();
            let n = a.rows();
            let xa = Matrix::from_fn(n, n, |i, j| {
                let c = f.neg(a.get(i, j));
                if i == j { r.from_coeffs(vec![c, 1]) } else { r.constant(c) }
            });
            let cp = charpoly(&f, &a);
            prop_assert_eq!(&cp, &poly_det(&f, &xa));
            // constant term is (-1)^n det A
            let d = det(&f, &a);
            let expect = if n % 2 == 0 { d } else { f.neg(&d) };
            prop_assert_eq!(r.coeff(&cp, 0), expect);
        }

        #[test]
        fn inverse_and_kernel(rows in (1usize..6).prop_flat_map(arb_matrix)) {
            let f = PrimeField::new(7).unwrap();
            let a = Matrix::from_rows(rows).unwrap();
            let n = a.rows();
            match inverse(&f, &a) {
                Some(inv) => {
                    prop_assert_eq!(mul(&f, &a, &inv), identity(&f, n));
                    prop_assert!(kernel(&f, &a).is_empty());
                }
                None => prop_assert_eq!(det(&f, &a), 0),
            }
            let ker = kernel(&f, &a);
            prop_assert_eq!(ker.len() + rank(&f, &a), n);
            for v in &ker {
                prop_assert!(mul_vec(&f, &a, v).iter().all(|x| *x == 0));
            }
        }
    }

    #[test]
    fn rational_det_and_inverse() {
        let q = Rationals;
        let a = from_i64(&q, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(det(&q, &a), q.one());
        let inv = inverse(&q, &a).unwrap();
        assert_eq!(inv, from_i64(&q, &[vec![1, -1], vec![-1, 2]]));
        let js = to_json(&q, &inv);
        assert_eq!(from_json(&q, &js).unwrap(), inv);
    }
}
