//! Lines on the base locus over Z_p, in affine charts of the Grassmannian.
//!
//! For a pivot set P of size n, the chart consists of the row spaces of
//! n x d matrices with the identity in the columns P and free integer entries
//! elsewhere. The line conditions B_k(r_i, r_j) = 0 (k = 1, 2, i <= j) are
//! n(n+1) polynomial equations in n(d - n) unknowns. A solution x mod p^j
//! whose Jacobian has a maximal minor of valuation e with j >= 2e + 1 lifts
//! to a genuine Z_p solution.

use std::sync::atomic::{AtomicBool, AtomicI64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::field::PrimeField;
use crate::isotropic;
use crate::linalg::Matrix;

/// A line over Z_p, given mod p^precision, with the valuation of its best
/// Jacobian minor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCertificate {
    pub p: u64,
    pub precision: u32,
    pub pivots: Vec<usize>,
    /// Rows of the chart matrix, entries in [0, p^precision).
    pub basis: Vec<Vec<u64>>,
    pub minor_valuation: u32,
}

/// Outcome of the search at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalSearch {
    Line(LineCertificate),
    /// No n-dimensional isotropic subspace exists mod p, so none exists over Q_p.
    NoLineModP,
    Inconclusive(String),
}

/// Highest precision k with p^k comfortably inside u64 arithmetic.
pub fn precision_ceiling(p: u64) -> u32 {
    let mut k = 0;
    let mut m: u128 = 1;
    while m * (p as u128) < (1u128 << 62) {
        m *= p as u128;
        k += 1;
    }
    k
}

pub(crate) fn residues(q: &Matrix<BigInt>, m: u64) -> Vec<Vec<u64>> {
    let mm = BigInt::from(m);
    (0..q.rows())
        .map(|i| (0..q.cols()).map(|j| q.get(i, j).mod_floor(&mm).to_u64().unwrap()).collect())
        .collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// The chart equations for a pivot set, with the forms reduced mod m.
struct Chart<'a> {
    forms: [Vec<Vec<u64>>; 2],
    m: u64,
    d: usize,
    pivots: &'a [usize],
    free: Vec<usize>,
}

impl<'a> Chart<'a> {
    fn new(q: [&Matrix<BigInt>; 2], m: u64, pivots: &'a [usize]) -> Self {
        let d = q[0].rows();
        let free = (0..d).filter(|c| !pivots.contains(c)).collect();
        Self { forms: [residues(q[0], m), residues(q[1], m)], m, d, pivots, free }
    }

    fn nvars(&self) -> usize {
        self.pivots.len() * self.free.len()
    }

    fn rows(&self, x: &[u64]) -> Vec<Vec<u64>> {
        let w = self.free.len();
        self.pivots
            .iter()
            .enumerate()
            .map(|(i, &piv)| {
                let mut r = vec![0; self.d];
                r[piv] = 1 % self.m;
                for (k, &c) in self.free.iter().enumerate() {
                    r[c] = x[i * w + k] % self.m;
                }
                r
            })
            .collect()
    }

    fn apply(&self, q: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        q.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&a, &b)| addmod(acc, mulmod(a, b, self.m), self.m))).collect()
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| addmod(acc, mulmod(x, y, self.m), self.m))
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.pivots.len();
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    }

    /// Values of the equations, in the order (form, i <= j).
    fn eval(&self, x: &[u64]) -> Vec<u64> {
        let rows = self.rows(x);
        let mut out = Vec::new();
        for q in &self.forms {
            let images: Vec<Vec<u64>> = rows.iter().map(|r| self.apply(q, r)).collect();
            for (i, j) in self.pairs() {
                out.push(self.dot(&rows[i], &images[j]));
            }
        }
        out
    }

    fn jacobian(&self, x: &[u64]) -> Vec<Vec<u64>> {
        let rows = self.rows(x);
        let w = self.free.len();
        let mut out = Vec::new();
        for q in &self.forms {
            let images: Vec<Vec<u64>> = rows.iter().map(|r| self.apply(q, r)).collect();
            for (i, j) in self.pairs() {
                let mut grad = vec![0; self.nvars()];
                for (k, &c) in self.free.iter().enumerate() {
                    grad[i * w + k] = addmod(grad[i * w + k], images[j][c], self.m);
                    grad[j * w + k] = addmod(grad[j * w + k], images[i][c], self.m);
                }
                out.push(grad);
            }
        }
        out
    }
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    debug_assert!(e.gcd == BigInt::from(1));
    e.x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

fn valuation_mod(a: u64, p: u64, j: u32) -> u32 {
    if a == 0 {
        return j;
    }
    let mut v = 0;
    let mut a = a;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v.min(j)
}

/// Valuation of the gcd of the maximal minors of a full-row-rank matrix,
/// read off from elimination with minimal-valuation pivots mod p^j. `None`
/// when the rows are dependent at this precision.
pub(crate) fn minor_valuation(mat: &[Vec<u64>], p: u64, j: u32) -> Option<u32> {
    let m = p.pow(j);
    let mut a: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|x| x % m).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut used_cols = vec![false; cols];
    let mut total = 0;
    for r in 0..rows {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(r) {
            for (c, &x) in row.iter().enumerate() {
                if used_cols[c] {
                    continue;
                }
                let v = valuation_mod(x, p, j);
                if v < j && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, c));
                }
            }
        }
        let (v, i, c) = best?;
        a.swap(r, i);
        used_cols[c] = true;
        total += v;
        let pv = p.pow(v);
        let unit_inv = inverse_mod(a[r][c] / pv, m);
        for i in r + 1..rows {
            let factor = mulmod(a[i][c] / pv, unit_inv, m);
            if factor == 0 {
                continue;
            }
            for k in 0..cols {
                let sub = mulmod(factor, a[r][k], m);
                a[i][k] = (a[i][k] + m - sub) % m;
            }
        }
    }
    Some(total)
}

/// Solutions of A y = b mod p for rows [A | b]: a particular solution and
/// a kernel basis, or `None` when inconsistent. Works for every prime p.
fn solve_mod_p(p: u64, nvars: usize, eqs: &[Vec<u64>]) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let mut a: Vec<Vec<u64>> = eqs.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..=nvars {
        let Some(i) = (row..a.len()).find(|&i| a[i][col] != 0) else { continue };
        if col == nvars {
            return None;
        }
        a.swap(row, i);
        let inv = inverse_mod(a[row][col], p);
        for x in a[row].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for i in 0..a.len() {
            if i != row && a[i][col] != 0 {
                let f = a[i][col];
                for k in 0..=nvars {
                    a[i][k] = (a[i][k] + p - mulmod(f, a[row][k], p)) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut particular = vec![0; nvars];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = a[r][nvars];
    }
    let kernel = (0..nvars)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![0; nvars];
            v[fc] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = (p - a[r][fc]) % p;
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

/// Depth-first lifting from a solution mod p, looking for a point that
/// satisfies the Hensel margin. Spends one unit of budget per node.
fn lift(q: [&Matrix<BigInt>; 2], p: u64, pivots: &[usize], x1: Vec<u64>, max_precision: u32, budget: &AtomicI64) -> Option<LineCertificate> {
    let mut stack = vec![(x1, 1u32)];
    while let Some((x, j)) = stack.pop() {
        if budget.fetch_sub(1, Ordering::Relaxed) <= 0 {
            return None;
        }
        let chart = Chart::new(q, p.pow(j), pivots);
        if let Some(e) = minor_valuation(&chart.jacobian(&x), p, j) {
            if j > 2 * e {
                return Some(LineCertificate { p, precision: j, pivots: pivots.to_vec(), basis: chart.rows(&x), minor_valuation: e });
            }
        }
        if j >= max_precision {
            continue;
        }
        // F(x + p^j y) = F(x) + p^j J(x) y mod p^(j+1)
        let pj = p.pow(j);
        let next = Chart::new(q, pj * p, pivots);
        let values = next.eval(&x);
        let jac = next.jacobian(&x);
        let eqs: Vec<Vec<u64>> = jac
            .iter()
            .zip(&values)
            .map(|(row, &v)| {
                let mut eq: Vec<u64> = row.iter().map(|a| a % p).collect();
                eq.push((p - (v / pj) % p) % p);
                eq
            })
            .collect();
        let Some((particular, kernel)) = solve_mod_p(p, chart.nvars(), &eqs) else {
            continue;
        };
        let count = p.checked_pow(kernel.len() as u32).unwrap_or(u64::MAX);
        let mut children = Vec::new();
        for idx in 0..count {
            if idx as i64 >= budget.load(Ordering::Relaxed) {
                break;
            }
            let mut y = particular.clone();
            let mut rest = idx;
            for kv in &kernel {
                let c = rest % p;
                rest /= p;
                for (yi, ki) in y.iter_mut().zip(kv) {
                    *yi = (*yi + c * ki) % p;
                }
            }
            children.push(x.iter().zip(&y).map(|(&a, &b)| a + pj * b).collect::<Vec<u64>>());
        }
        // pop order visits children in index order
        stack.extend(children.into_iter().rev().map(|c| (c, j + 1)));
    }
    None
}

/// Looks for a certified line over Z_p for the integral forms `q`, starting
/// from the n-dimensional isotropic subspaces mod p in canonical order.
pub fn search_line(q: [&Matrix<BigInt>; 2], n: usize, p: u64, max_precision: u32, node_budget: i64) -> LocalSearch {
    if !crate::arith::is_prime_u64(p) {
        return LocalSearch::Inconclusive(format!("{p} is not a prime"));
    }
    let d = q[0].rows();
    let max_precision = max_precision.clamp(1, precision_ceiling(p));
    let budget = AtomicI64::new(node_budget);
    let saw_line = AtomicBool::new(false);
    let start = |pivots: &[usize], rows: &[Vec<u64>]| {
        saw_line.store(true, Ordering::Relaxed);
        let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
        let x: Vec<u64> = rows.iter().flat_map(|r| free.iter().map(|&c| r[c])).collect();
        lift(q, p, pivots, x, max_precision, &budget)
    };
    let (found, exhausted) = match PrimeField::new(p) {
        Ok(fp) => {
            let reduced = [residues(q[0], p), residues(q[1], p)].map(|r| Matrix::from_rows(r).expect("square"));
            isotropic::search_forms(&fp, [&reduced[0], &reduced[1]], n, &budget, start)
        }
        Err(_) => {
            let found = chart_points_mod_p(q, n, p, &budget).into_iter().find_map(|(pivots, rows)| start(&pivots, &rows));
            (found, budget.load(Ordering::Relaxed) <= 0)
        }
    };
    match found {
        Some(cert) => LocalSearch::Line(cert),
        None if exhausted => LocalSearch::Inconclusive(format!("node budget {node_budget} exhausted")),
        None if saw_line.load(Ordering::Relaxed) => LocalSearch::Inconclusive(format!(
            "lines exist mod {p} but none was certified up to precision {max_precision}"
        )),
        None => LocalSearch::NoLineModP,
    }
}

/// Isotropic n-dimensional subspaces mod p in echelon form, by running
/// through every echelon matrix. Used where no prime field type is
/// available (p = 2), so only for tiny p.
fn chart_points_mod_p(q: [&Matrix<BigInt>; 2], n: usize, p: u64, budget: &AtomicI64) -> Vec<(Vec<usize>, Vec<Vec<u64>>)> {
    let d = q[0].rows();
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..n).collect();
    loop {
        // echelon shape: entries right of each pivot, outside other pivots
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &piv)| (piv + 1..d).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        let chart = Chart::new(q, p, &pivots);
        let total = p.checked_pow(slots.len() as u32).unwrap_or(u64::MAX);
        for idx in 0..total {
            if budget.fetch_sub(1, Ordering::Relaxed) <= 0 {
                return out;
            }
            let mut rows: Vec<Vec<u64>> = pivots.iter().map(|&piv| (0..d).map(|c| (c == piv) as u64).collect()).collect();
            let mut rest = idx;
            for &(i, c) in &slots {
                rows[i][c] = rest % p;
                rest /= p;
            }
            let x: Vec<u64> = rows.iter().flat_map(|r| chart.free.iter().map(|&c| r[c])).collect();
            if chart.eval(&x).iter().all(|&v| v == 0) {
                out.push((pivots.clone(), rows));
            }
        }
        // next pivot set in lexicographic order
        let Some(i) = (0..n).rev().find(|&i| pivots[i] < d - n + i) else { break };
        pivots[i] += 1;
        for k in i + 1..n {
            pivots[k] = pivots[k - 1] + 1;
        }
    }
    out.sort();
    out
}

/// Re-checks a certificate from scratch: the chart shape, vanishing of every
/// pairing mod p^k and the Hensel margin k >= 2e + 1.
pub fn verify_certificate(q: [&Matrix<BigInt>; 2], cert: &LineCertificate) -> bool {
    let d = q[0].rows();
    let (p, k) = (cert.p, cert.precision);
    if k == 0 || k > precision_ceiling(p) || cert.basis.len() != cert.pivots.len() {
        return false;
    }
    let m = p.pow(k);
    let chart = Chart::new(q, m, &cert.pivots);
    let shape_ok = cert.basis.iter().zip(&cert.pivots).all(|(row, &piv)| {
        row.len() == d
            && row.iter().all(|&x| x < m)
            && cert.pivots.iter().all(|&c| row[c] == (c == piv) as u64 % m)
    });
    if !shape_ok {
        return false;
    }
    let x: Vec<u64> = cert.basis.iter().flat_map(|r| chart.free.iter().map(|&c| r[c])).collect();
    if chart.eval(&x).iter().any(|&v| v != 0) {
        return false;
    }
    match minor_valuation(&chart.jacobian(&x), p, k) {
        Some(e) => e == cert.minor_valuation && k > 2 * e,
        None => false,
    }
}
