//! Subspaces isotropic for every member of a pencil over a finite field.
//!
//! Subspaces are enumerated by their reduced row echelon bases. For a fixed
//! set of pivot columns the rows are chosen one at a time: orthogonality to
//! the rows already chosen is linear in the free entries of the new row, so
//! those constraints are solved first and only the solutions are tested for
//! the two quadratic conditions. Each subspace is produced exactly once.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicI64, Ordering};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::linalg::{self, Mat, Matrix};
use crate::pencil::Pencil;
use crate::quadform::Subspace;

/// Searches predicted to visit more nodes than this are refused.
pub const NODE_BOUND: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct IsotropicCatalog<E> {
    pub dim: usize,
    /// Sorted by echelon basis.
    pub subspaces: Vec<Subspace<E>>,
}

impl<E: Clone + Ord> IsotropicCatalog<E> {
    pub fn count(&self) -> usize {
        self.subspaces.len()
    }

    pub fn position(&self, a: &Subspace<E>) -> Option<usize> {
        self.subspaces.binary_search(a).ok()
    }
}

impl<E: Clone + Eq> IsotropicCatalog<E> {
    pub fn to_json<F: Field<Elem = E>>(&self, f: &F, count_only: bool) -> Value {
        let mut v = json!({ "s": self.dim, "count": self.subspaces.len() });
        if !count_only {
            v["subspaces"] = Value::Array(self.subspaces.iter().map(|a| a.to_json(f)).collect());
        }
        v
    }
}

/// Whether both forms vanish identically on the subspace.
pub fn is_common_isotropic<F: Field>(p: &Pencil<F>, a: &Subspace<F::Elem>) -> Result<bool> {
    if a.ambient() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: a.ambient() });
    }
    let f = p.field();
    let b = a.basis();
    Ok([p.q1(), p.q2()]
        .iter()
        .all(|q| b.iter().all(|u| b.iter().all(|v| f.is_zero(&linalg::bilinear(f, q, u, v))))))
}

/// Rough node count of the search: the expected number of isotropic
/// i-dimensional subspaces (Gaussian binomial over q^(i(i+1)), one factor of
/// q per condition) times the candidates for the next row that survive the
/// linear constraints.
pub fn predicted_nodes(q: u64, d: usize, s: usize) -> f64 {
    let q = q as f64;
    let mut total = 0.0;
    for i in 0..s {
        let mut gauss = 1.0;
        for j in 0..i {
            gauss *= (q.powi((d - j) as i32) - 1.0) / (q.powi((j + 1) as i32) - 1.0);
        }
        let expected = (gauss / q.powi((i * (i + 1)) as i32)).max(1.0);
        let branch = q.powi((d as i32 - 1 - 3 * i as i32).max(0));
        total += expected * branch;
    }
    total
}

fn check_budget<F: FiniteField>(p: &Pencil<F>, s: usize) -> Result<()> {
    let nodes = predicted_nodes(p.field().order(), p.dim(), s);
    if nodes > NODE_BOUND {
        return Err(Error::Resource(format!(
            "isotropic search in dimension {} for s = {s} over F_{} predicts {nodes:.2e} nodes",
            p.dim(),
            p.field().order()
        )));
    }
    Ok(())
}

fn pivot_sets(d: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=d - left {
            cur.push(i);
            rec(i + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, s, &mut Vec::new(), &mut out);
    out
}

struct Search<'a, F: FiniteField> {
    field: &'a F,
    forms: [&'a Mat<F>; 2],
    d: usize,
    pivots: &'a [usize],
    /// Candidate rows left to examine, shared between workers.
    budget: &'a AtomicI64,
}

impl<F: FiniteField> Search<'_, F> {
    /// Depth-first over rows; `visit` sees complete bases and may stop the
    /// search.
    fn run<B>(&self, rows: &mut Vec<Vec<F::Elem>>, visit: &mut impl FnMut(&[Vec<F::Elem>]) -> ControlFlow<B>) -> ControlFlow<B> {
        let i = rows.len();
        if i == self.pivots.len() {
            return visit(rows);
        }
        let k = self.field;
        let piv = self.pivots[i];
        let free: Vec<usize> = (piv + 1..self.d).filter(|c| !self.pivots.contains(c)).collect();
        // B(r, row_j) = (Q row_j)[piv] + sum_f x_f (Q row_j)[f] = 0
        let mut eqs: Vec<Vec<F::Elem>> = Vec::new();
        for prev in rows.iter() {
            for q in self.forms {
                let w = linalg::mul_vec(k, q, prev);
                let mut eq: Vec<F::Elem> = free.iter().map(|&c| w[c].clone()).collect();
                eq.push(k.neg(&w[piv]));
                eqs.push(eq);
            }
        }
        let Some((particular, kernel)) = affine_solutions(k, free.len(), &eqs) else {
            return ControlFlow::Continue(());
        };
        let q = k.order();
        let count = q.pow(kernel.len() as u32);
        for idx in 0..count {
            if self.budget.fetch_sub(1, Ordering::Relaxed) <= 0 {
                return ControlFlow::Continue(());
            }
            let mut x = particular.clone();
            let mut rest = idx;
            for kv in &kernel {
                let c = k.element(rest % q);
                rest /= q;
                if !k.is_zero(&c) {
                    for (xi, ki) in x.iter_mut().zip(kv) {
                        *xi = k.add(xi, &k.mul(&c, ki));
                    }
                }
            }
            let mut row = vec![k.zero(); self.d];
            row[piv] = k.one();
            for (&c, v) in free.iter().zip(x) {
                row[c] = v;
            }
            if self.forms.iter().all(|q| k.is_zero(&linalg::bilinear(k, q, &row, &row))) {
                rows.push(row);
                let r = self.run(rows, visit);
                rows.pop();
                r?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Solutions of A x = b given as rows [A | b]: a particular solution and a
/// kernel basis, or `None` when inconsistent.
pub(crate) fn affine_solutions<F: Field>(k: &F, nvars: usize, eqs: &[Vec<F::Elem>]) -> Option<(Vec<F::Elem>, Vec<Vec<F::Elem>>)> {
    if eqs.is_empty() {
        let kernel = (0..nvars)
            .map(|i| (0..nvars).map(|j| if i == j { k.one() } else { k.zero() }).collect())
            .collect();
        return Some((vec![k.zero(); nvars], kernel));
    }
    let m = Matrix::from_rows(eqs.to_vec()).expect("rows of equal length");
    let (r, piv) = linalg::rref(k, &m);
    if piv.contains(&nvars) {
        return None;
    }
    let mut particular = vec![k.zero(); nvars];
    for (row, &c) in piv.iter().enumerate() {
        particular[c] = r.get(row, nvars).clone();
    }
    let kernel = (0..nvars)
        .filter(|c| !piv.contains(c))
        .map(|fc| {
            let mut v = vec![k.zero(); nvars];
            v[fc] = k.one();
            for (row, &c) in piv.iter().enumerate() {
                v[c] = k.neg(r.get(row, fc));
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

fn validate<F: FiniteField>(p: &Pencil<F>, s: usize) -> Result<()> {
    p.require_nonsingular()?;
    if s == 0 || s > p.dim() {
        return Err(Error::InvalidInput(format!("subspace dimension {s} out of range 1..={}", p.dim())));
    }
    check_budget(p, s)
}

/// All s-dimensional subspaces isotropic for both forms, in canonical
/// order. Pivot sets are searched in parallel; the result does not depend on
/// the number of workers.
pub fn enumerate_common_isotropic<F: FiniteField>(p: &Pencil<F>, s: usize) -> Result<IsotropicCatalog<F::Elem>> {
    validate(p, s)?;
    let d = p.dim();
    let field = p.field();
    let budget = AtomicI64::new(i64::MAX);
    let budget = &budget;
    let mut subspaces: Vec<Subspace<F::Elem>> = pivot_sets(d, s)
        .par_iter()
        .flat_map_iter(|pivots| {
            let search = Search { field, forms: [p.q1(), p.q2()], d, pivots, budget };
            let mut found = Vec::new();
            let _ = search.run::<()>(&mut Vec::new(), &mut |rows| {
                found.push(Subspace::from_echelon_unchecked(d, rows.to_vec()));
                ControlFlow::Continue(())
            });
            found
        })
        .collect();
    subspaces.sort();
    Ok(IsotropicCatalog { dim: s, subspaces })
}

/// An n-dimensional common isotropic subspace, if one exists (the first in
/// canonical order).
pub fn soluble_witness<F: FiniteField>(p: &Pencil<F>) -> Result<Option<Subspace<F::Elem>>> {
    let s = p.n();
    validate(p, s)?;
    let budget = AtomicI64::new(i64::MAX);
    let (found, _) = search_forms(p.field(), [p.q1(), p.q2()], s, &budget, |_, rows| Some(rows.to_vec()));
    Ok(found.map(|rows| Subspace::from_echelon_unchecked(p.dim(), rows)))
}

/// Runs `visit` on the echelon bases of s-dimensional subspaces isotropic for
/// both forms (which may be singular) until it returns `Some`. The result is
/// the first hit in canonical order. Every candidate row costs one unit of
/// `budget`; the flag reports whether the budget ran out, in which case a
/// `None` result is inconclusive.
pub(crate) fn search_forms<F: FiniteField, B: Send>(
    field: &F,
    forms: [&Mat<F>; 2],
    s: usize,
    budget: &AtomicI64,
    visit: impl Fn(&[usize], &[Vec<F::Elem>]) -> Option<B> + Sync,
) -> (Option<B>, bool) {
    let d = forms[0].rows();
    let found = pivot_sets(d, s).par_iter().find_map_first(|pivots| {
        let search = Search { field, forms, d, pivots, budget };
        match search.run(&mut Vec::new(), &mut |rows| match visit(pivots, rows) {
            Some(b) => ControlFlow::Break(b),
            None => ControlFlow::Continue(()),
        }) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    });
    (found, budget.load(Ordering::Relaxed) <= 0)
}

pub fn is_soluble<F: FiniteField>(p: &Pencil<F>) -> Result<bool> {
    Ok(soluble_witness(p)?.is_some())
}

/// The permutation of a catalog induced by a linear automorphism of the
/// pencil acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogAction {
    pub permutation: Vec<usize>,
    pub fixed_points: Vec<usize>,
}

pub fn aut_action<F: FiniteField>(
    p: &Pencil<F>,
    lift: &Mat<F>,
    catalog: &IsotropicCatalog<F::Elem>,
) -> Result<CatalogAction> {
    let k = p.field();
    let preserves = |q: &Mat<F>| linalg::congruence(k, q, lift) == *q;
    if lift.rows() != p.dim() || !preserves(p.q1()) || !preserves(p.q2()) {
        return Err(Error::InvalidInput("matrix is not an automorphism of this pencil".into()));
    }
    let mut permutation = Vec::with_capacity(catalog.count());
    for a in &catalog.subspaces {
        let image: Vec<Vec<F::Elem>> = a.basis().iter().map(|v| linalg::mul_vec(k, lift, v)).collect();
        let b = Subspace::span(k, p.dim(), &image)?;
        let j = catalog
            .position(&b)
            .ok_or_else(|| Error::InvalidInput("catalog is not complete for this pencil".into()))?;
        permutation.push(j);
    }
    let fixed_points = permutation.iter().enumerate().filter(|(i, j)| i == *j).map(|(i, _)| i).collect();
    Ok(CatalogAction { permutation, fixed_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arulwang;
    use crate::field::PrimeField;
    use crate::hyperell::HyperellipticCurve;
    use crate::poly::PolyRing;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn aw(p: u64, f: &[i64]) -> Pencil<PrimeField> {
        let fp = PrimeField::new(p).unwrap();
        arulwang::build(&fp, &PolyRing::new(&fp).from_i64s(f)).unwrap().pencil
    }

    /// Every s-subspace in echelon form, filtered by the definition.
    fn brute(p: &Pencil<PrimeField>, s: usize) -> Vec<Subspace<u64>> {
        let fp = *p.field();
        let q = fp.p();
        let d = p.dim();
        let mut out = Vec::new();
        for pivots in pivot_sets(d, s) {
            let slots: Vec<(usize, usize)> = (0..s)
                .flat_map(|i| (pivots[i] + 1..d).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
                .collect();
            for idx in 0..q.pow(slots.len() as u32) {
                let mut rows = vec![vec![0u64; d]; s];
                for (i, &pv) in pivots.iter().enumerate() {
                    rows[i][pv] = 1;
                }
                let mut rest = idx;
                for &(i, c) in &slots {
                    rows[i][c] = rest % q;
                    rest /= q;
                }
                let a = Subspace::from_echelon_unchecked(d, rows);
                if is_common_isotropic(p, &a).unwrap() {
                    out.push(a);
                }
            }
        }
        out.sort();
        out
    }

    /// Projective points of the base locus, first nonzero coordinate 1.
    fn base_locus_points(p: &Pencil<PrimeField>) -> usize {
        let fp = *p.field();
        let q = fp.p();
        let d = p.dim();
        (1..q.pow(d as u32))
            .map(|idx| (0..d).map(|i| idx / q.pow(i as u32) % q).collect::<Vec<u64>>())
            .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
            .filter(|v| [p.q1(), p.q2()].iter().all(|g| linalg::bilinear(&fp, g, v, v) == 0))
            .count()
    }

    fn random_conjugate(p: &Pencil<PrimeField>, rng: &mut ChaCha8Rng) -> Pencil<PrimeField> {
        let fp = *p.field();
        loop {
            let m = Matrix::from_fn(p.dim(), p.dim(), |_, _| rng.gen_range(0..fp.p()));
            if linalg::det(&fp, &m) != 0 {
                return p.transform(&m).unwrap();
            }
        }
    }

    #[test]
    fn matches_brute_force_over_f3() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [[0i64, 1, 0, 0, 0, 0, 1], [1, 0, 1, 0, 0, 1, 1]] {
            let base = aw(3, &f);
            for p in [base.clone(), random_conjugate(&base, &mut rng)] {
                for s in 1..=3 {
                    let cat = enumerate_common_isotropic(&p, s).unwrap();
                    assert_eq!(cat.subspaces, brute(&p, s), "s = {s}");
                }
                let cat = enumerate_common_isotropic(&p, 1).unwrap();
                assert_eq!(cat.count(), base_locus_points(&p));
                assert_eq!(enumerate_common_isotropic(&p, 3).unwrap().count(), 0);
            }
        }
    }

    #[test]
    fn genus_two_count_is_jacobian_order() {
        for p in [3u64, 5] {
            let fp = PrimeField::new(p).unwrap();
            let r = PolyRing::new(&fp);
            for f in [[0i64, 1, 0, 0, 0, 0, 1], [1, 1, 0, 0, 0, 1, 1], [2, 0, 0, 1, 0, 0, 1]] {
                let poly = r.from_i64s(&f);
                if !r.is_squarefree(&poly).unwrap() {
                    continue;
                }
                let pen = arulwang::build(&fp, &poly).unwrap().pencil;
                let c = HyperellipticCurve::new(fp, poly).unwrap();
                let n = enumerate_common_isotropic(&pen, 2).unwrap().count() as u128;
                assert_eq!(n, c.jacobian_order().unwrap());
            }
        }
    }

    #[test]
    fn witness_and_solubility() {
        let p = aw(5, &[-1, 0, 0, 0, 0, 0, 1]);
        let fp = *p.field();
        let w = soluble_witness(&p).unwrap().unwrap();
        assert!(is_common_isotropic(&p, &w).unwrap());
        let ap = arulwang::build(&fp, &PolyRing::new(&fp).from_i64s(&[-1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert!(is_common_isotropic(&p, &ap.solubility_witness()).unwrap());
        // for n = 1 solubility means a rational point on the base locus
        let q1 = linalg::diagonal(&fp, &[1, 1, 1, 1]);
        let q2 = linalg::diagonal(&fp, &[0, 1, 2, 3]);
        let p4 = Pencil::new(fp, 1, q1, q2).unwrap();
        assert_eq!(is_soluble(&p4).unwrap(), base_locus_points(&p4) > 0);
    }

    #[test]
    fn nonsingular_is_required() {
        let fp = PrimeField::new(5).unwrap();
        let id = linalg::identity(&fp, 6);
        let p = Pencil::new(fp, 2, id.clone(), id).unwrap();
        assert_eq!(enumerate_common_isotropic(&p, 2).unwrap_err(), Error::SingularPencil);
    }

    #[test]
    fn governor_refuses_large_searches() {
        assert!(predicted_nodes(7, 6, 2) < NODE_BOUND);
        assert!(predicted_nodes(101, 6, 2) > NODE_BOUND);
        let p = aw(101, &[-1, 0, 0, 0, 0, 0, 1]);
        assert!(matches!(enumerate_common_isotropic(&p, 2), Err(Error::Resource(_))));
    }

    #[test]
    fn automorphisms_act_freely_on_lines() {
        let p = aw(7, &[-1, 0, 0, 0, 0, 0, 1]);
        let cat = enumerate_common_isotropic(&p, 2).unwrap();
        let g = p.aut_plus().unwrap();
        assert_eq!(g.order(), 16);
        for (a, t) in g.elements.iter().zip(&g.lifts) {
            let act = aut_action(&p, t, &cat).unwrap();
            if a.is_identity() {
                assert_eq!(act.fixed_points.len(), cat.count());
            } else {
                assert!(act.fixed_points.is_empty());
            }
            let twice: Vec<usize> = act.permutation.iter().map(|&j| act.permutation[j]).collect();
            assert_eq!(twice, (0..cat.count()).collect::<Vec<_>>());
        }
        let fp = *p.field();
        let bad = linalg::diagonal(&fp, &[1, 1, 1, 1, 1, 6]);
        assert!(aut_action(&p, &bad, &cat).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn definition_is_entrywise(rows in prop::collection::vec(prop::collection::vec(0u64..7, 6), 2)) {
            let p = aw(7, &[-1, 0, 0, 0, 0, 0, 1]);
            let fp = *p.field();
            let a = Subspace::span(&fp, 6, &rows).unwrap();
            let b = Matrix::from_rows(a.basis().to_vec()).unwrap_or_else(|_| linalg::zeros(&fp, 0, 6));
            let expected = a.dim() == 0 || [p.q1(), p.q2()].iter().all(|q| {
                linalg::is_zero(&fp, &linalg::mul(&fp, &linalg::mul(&fp, &b, q), &b.transpose()))
            });
            prop_assert_eq!(is_common_isotropic(&p, &a).unwrap(), expected);
        }
    }
}
