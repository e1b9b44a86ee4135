//! Search for rational points on the base locus Q1 = Q2 = 0 by height.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::linalg::Matrix;

/// Primes whose residue tables prune the search.
const SIEVE_PRIMES: [u64; 3] = [3, 5, 7];
/// Residue tables larger than this are skipped.
const SIEVE_TABLE_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSearch {
    pub height_bound: u32,
    /// First primitive zero in search order, with its max-norm.
    pub point: Option<Vec<BigInt>>,
    pub height: Option<u32>,
    /// Set when a form is definite, so no real zero exists at any height.
    pub definite_form: bool,
}

/// Residue classes mod l on which both forms vanish.
struct Sieve {
    l: u64,
    table: Vec<bool>,
}

impl Sieve {
    fn new(q: [&Matrix<BigInt>; 2], l: u64) -> Option<Self> {
        let d = q[0].rows() as u32;
        let size = l.checked_pow(d).filter(|&s| s <= SIEVE_TABLE_BOUND)?;
        let res = q.map(|m| super::padic::residues(m, l));
        let table = (0..size)
            .into_par_iter()
            .map(|idx| {
                let x: Vec<u64> = (0..d).map(|i| idx / l.pow(i) % l).collect();
                res.iter().all(|g| {
                    let mut s = 0;
                    for (i, row) in g.iter().enumerate() {
                        for (j, a) in row.iter().enumerate() {
                            s = (s + a * x[i] % l * x[j]) % l;
                        }
                    }
                    s == 0
                })
            })
            .collect();
        Some(Self { l, table })
    }

    fn admits(&self, x: &[i64]) -> bool {
        let l = self.l as i64;
        let mut idx = 0u64;
        for &xi in x.iter().rev() {
            idx = idx * self.l + xi.rem_euclid(l) as u64;
        }
        self.table[idx as usize]
    }
}

enum Forms {
    Small([Vec<Vec<i128>>; 2]),
    Big([Vec<Vec<BigInt>>; 2]),
}

impl Forms {
    fn new(q: [&Matrix<BigInt>; 2]) -> Self {
        let small = q.iter().all(|m| m.to_rows().iter().flatten().all(|x| x.to_i64().is_some()));
        if small {
            Forms::Small(q.map(|m| m.map(|x| x.to_i128().unwrap()).to_rows()))
        } else {
            Forms::Big(q.map(|m| m.to_rows()))
        }
    }

    fn vanish(&self, x: &[i64]) -> bool {
        match self {
            Forms::Small(g) => g.iter().all(|m| {
                let mut s: i128 = 0;
                for (i, row) in m.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        s += a * (x[i] as i128) * (x[j] as i128);
                    }
                }
                s == 0
            }),
            Forms::Big(g) => g.iter().all(|m| {
                let mut s = BigInt::zero();
                for (i, row) in m.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        s += a * x[i] * x[j];
                    }
                }
                s.is_zero()
            }),
        }
    }
}

/// Advances x over [-h, h]^len in lexicographic order; false at the end.
fn next_tuple(x: &mut [i64], h: i64) -> bool {
    for xi in x.iter_mut().rev() {
        if *xi < h {
            *xi += 1;
            return true;
        }
        *xi = -h;
    }
    false
}

/// Whether x is a canonical representative of its projective class at
/// max-norm exactly h: primitive, first nonzero entry positive.
fn canonical(x: &[i64], h: i64) -> bool {
    match x.iter().find(|&&v| v != 0) {
        Some(&v) if v > 0 => {}
        _ => return false,
    }
    x.iter().any(|v| v.abs() == h) && x.iter().fold(0i64, |g, &v| g.gcd(&v)) == 1
}

/// The first zero of both forms in the order: max-norm h = 1, 2, ..., H,
/// then lexicographic within a shell. Shells are split by the first
/// coordinate across workers without changing the result.
pub fn point_search(q: [&Matrix<BigInt>; 2], definite_form: bool, height_bound: u32) -> PointSearch {
    let mut out = PointSearch { height_bound, point: None, height: None, definite_form };
    if definite_form {
        return out;
    }
    let d = q[0].rows();
    let sieves: Vec<Sieve> = SIEVE_PRIMES.iter().filter_map(|&l| Sieve::new(q, l)).collect();
    let forms = Forms::new(q);
    for h in 1..=height_bound as i64 {
        let hit = (0..=h).into_par_iter().find_map_first(|x0| {
            let mut x = vec![-h; d];
            x[0] = x0;
            loop {
                if canonical(&x, h) && sieves.iter().all(|s| s.admits(&x)) && forms.vanish(&x) {
                    return Some(x);
                }
                if !next_tuple(&mut x[1..], h) {
                    return None;
                }
            }
        });
        if let Some(x) = hit {
            out.point = Some(x.into_iter().map(BigInt::from).collect());
            out.height = Some(h as u32);
            break;
        }
    }
    out
}
