//! Local invariants of rational quadratic forms: Hilbert symbols, Hasse
//! invariants and isotropy over Q_p, R and Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::diagonalize_congruence;
use crate::arith::{factor_bigint, legendre, split_valuation};
use crate::error::{Error, Result};
use crate::field::Rationals;
use crate::linalg::Mat;

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Integer in the same square class as a nonzero rational.
fn integral_rep(a: &BigRational) -> BigInt {
    a.numer() * a.denom()
}

fn nonzero(a: &BigRational) -> Result<()> {
    if a.is_zero() {
        Err(Error::InvalidInput("Hilbert symbols need nonzero arguments".into()))
    } else {
        Ok(())
    }
}

fn mod8(u: &BigInt) -> u64 {
    u.mod_floor(&BigInt::from(8)).to_u64().unwrap()
}

/// The Hilbert symbol (a, b)_v in {1, -1}.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i32> {
    nonzero(a)?;
    nonzero(b)?;
    let (a, b) = (integral_rep(a), integral_rep(b));
    Ok(match place {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(&a, 2);
            let (beta, v) = split_valuation(&b, 2);
            let eps = |x: &BigInt| ((mod8(x) - 1) / 2) % 2;
            let omega = |x: &BigInt| {
                let r = mod8(x);
                ((r * r - 1) / 8) % 2
            };
            let e = eps(&u) * eps(&v) + alpha as u64 * omega(&v) + beta as u64 * omega(&u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(&a, p);
            let (beta, v) = split_valuation(&b, p);
            let mut s = if (alpha as u64 * beta as u64 * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
            if beta % 2 == 1 {
                s *= legendre(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(&v, p);
            }
            s
        }
    })
}

/// Product of (a_i, a_j)_v over i < j.
pub fn hasse_invariant(diag: &[BigRational], place: Place) -> Result<i32> {
    let mut h = 1;
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            h *= hilbert_symbol(&diag[i], &diag[j], place)?;
        }
    }
    if diag.len() == 1 {
        nonzero(&diag[0])?;
    }
    Ok(h)
}

/// Whether a nonzero rational is a square in Q_v.
pub fn is_local_square(a: &BigRational, place: Place) -> bool {
    let a = integral_rep(a);
    match place {
        Place::Real => a.is_positive(),
        Place::Prime(p) => {
            let (v, u) = split_valuation(&a, p);
            if v % 2 == 1 {
                return false;
            }
            if p == 2 {
                mod8(&u) == 1
            } else {
                legendre(&u, p) == 1
            }
        }
    }
}

fn nonsingular_diagonal(g: &Mat<Rationals>) -> Result<Vec<BigRational>> {
    let (_, d) = diagonalize_congruence(&Rationals, g)?;
    if d.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("local isotropy requires a nonsingular form".into()));
    }
    Ok(d)
}

/// Isotropy of a nonsingular diagonal form over Q_v, by dimension:
/// 2: -disc is a square; 3: (-1, -disc) = Hasse invariant; 4: disc is not a
/// square, or it is and the Hasse invariant equals (-1, -1); 5 and up: always
/// (except at the real place, where definiteness decides).
pub fn diagonal_isotropic_at(diag: &[BigRational], place: Place) -> Result<bool> {
    for a in diag {
        nonzero(a)?;
    }
    if place == Place::Real {
        let pos = diag.iter().filter(|a| a.is_positive()).count();
        return Ok(pos > 0 && pos < diag.len());
    }
    let disc: BigRational = diag.iter().fold(BigRational::one(), |acc, a| acc * a);
    let m1 = BigRational::from_integer(BigInt::from(-1));
    Ok(match diag.len() {
        0 | 1 => false,
        2 => is_local_square(&(-disc), place),
        3 => hilbert_symbol(&m1, &(-disc), place)? == hasse_invariant(diag, place)?,
        4 => {
            !is_local_square(&disc, place)
                || hasse_invariant(diag, place)? == hilbert_symbol(&m1, &m1, place)?
        }
        _ => true,
    })
}

pub fn isotropic_over_qp(g: &Mat<Rationals>, place: Place) -> Result<bool> {
    diagonal_isotropic_at(&nonsingular_diagonal(g)?, place)
}

/// Outcome of the Hasse-Minkowski test over Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalIsotropy {
    pub isotropic: bool,
    /// A place where the form is anisotropic, when there is one.
    pub obstruction: Option<Place>,
    /// Places that were examined (all others are automatic).
    pub places: Vec<Place>,
}

/// Decides isotropy over Q by checking the real place and every prime that
/// divides 2 and the numerators and denominators of a diagonal model.
pub fn isotropic_over_q(g: &Mat<Rationals>) -> Result<GlobalIsotropy> {
    let d = nonsingular_diagonal(g)?;
    let mut places = vec![Place::Real, Place::Prime(2)];
    for a in &d {
        for n in [a.numer(), a.denom()] {
            let fac = factor_bigint(n);
            if !fac.is_complete() {
                return Err(Error::Resource(format!("could not factor {n}")));
            }
            places.extend(fac.primes.iter().map(|&(p, _)| Place::Prime(p)));
        }
    }
    places.sort();
    places.dedup();
    for &pl in &places {
        if !diagonal_isotropic_at(&d, pl)? {
            return Ok(GlobalIsotropy { isotropic: false, obstruction: Some(pl), places });
        }
    }
    // at primes not listed every entry is a unit; binary forms still need
    // -disc to be a square there, which holds everywhere iff it is a rational
    // square
    if d.len() == 2 {
        let m = -(&d[0] * &d[1]);
        let square = crate::arith::is_perfect_square(&integral_rep(&m));
        if !square {
            let fac = factor_bigint(&integral_rep(&m));
            let witness = fac
                .primes
                .iter()
                .find(|(_, e)| e % 2 == 1)
                .map(|&(p, _)| Place::Prime(p));
            return Ok(GlobalIsotropy { isotropic: false, obstruction: witness, places });
        }
    }
    Ok(GlobalIsotropy { isotropic: d.len() >= 2, obstruction: None, places })
}
