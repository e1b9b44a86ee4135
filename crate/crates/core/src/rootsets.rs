//! Even subsets of a root set modulo complementation, the combinatorial
//! model shared by the automorphism group of a pencil and the rational
//! 2-torsion of the Jacobian.
//!
//! Subsets of `{0, .., d-1}` are bitmasks. The canonical representative of
//! `{S, complement(S)}` is the one not containing index `d - 1`.

use crate::error::{Error, Result};

pub fn full(d: usize) -> u64 {
    assert!(d < 64);
    (1u64 << d) - 1
}

pub fn canonical(mask: u64, d: usize) -> u64 {
    if mask >> (d - 1) & 1 == 1 {
        mask ^ full(d)
    } else {
        mask
    }
}

pub fn is_even(mask: u64) -> bool {
    mask.count_ones() % 2 == 0
}

/// Group law: symmetric difference, then canonical form.
pub fn compose(a: u64, b: u64, d: usize) -> u64 {
    canonical(a ^ b, d)
}

pub fn from_indices(indices: &[usize], d: usize) -> Result<u64> {
    let mut mask = 0u64;
    for &i in indices {
        if i >= d {
            return Err(Error::InvalidInput(format!("root index {i} out of range 0..{d}")));
        }
        if mask >> i & 1 == 1 {
            return Err(Error::InvalidInput(format!("root index {i} repeated")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

pub fn to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// Image of a subset under the index permutation `i -> perm[i]`.
pub fn apply_perm(mask: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(0, |acc, (_, &j)| acc | 1 << j)
}

pub fn perm_power(perm: &[usize], e: usize) -> Vec<usize> {
    (0..perm.len())
        .map(|i| (0..e).fold(i, |j, _| perm[j]))
        .collect()
}

/// Orbits of a permutation as bitmasks, ordered by smallest element.
pub fn orbits(perm: &[usize]) -> Vec<u64> {
    let mut seen = 0u64;
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen >> start & 1 == 1 {
            continue;
        }
        let mut orbit = 0u64;
        let mut i = start;
        while orbit >> i & 1 == 0 {
            orbit |= 1 << i;
            i = perm[i];
        }
        seen |= orbit;
        out.push(orbit);
    }
    out
}

/// Canonical even classes fixed by the permutation, sorted. Stability is
/// taken modulo complementation.
pub fn stable_classes(perm: &[usize]) -> Vec<u64> {
    let d = perm.len();
    let mut out: Vec<u64> = (0..1u64 << (d - 1))
        .filter(|&m| is_even(m) && canonical(apply_perm(m, perm), d) == m)
        .collect();
    out.sort_unstable();
    out
}

/// Order of the group of stable classes from the orbit structure alone.
///
/// With r orbits: 2^(r-2) if some orbit has odd length. If every orbit is
/// even there are 2^(r-1) unions of orbits up to complement, doubled when
/// d/2 is even by the classes that pick alternate points of every orbit
/// (these are sent to their complements).
pub fn stable_class_count(perm: &[usize]) -> u64 {
    let orbs = orbits(perm);
    let r = orbs.len() as u32;
    if orbs.iter().all(|o| o.count_ones() % 2 == 0) {
        if (perm.len() / 2) % 2 == 0 {
            1 << r
        } else {
            1 << (r - 1)
        }
    } else {
        1 << (r.max(2) - 2)
    }
}
