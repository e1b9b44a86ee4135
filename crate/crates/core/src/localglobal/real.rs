//! Real roots of the discriminant by Sturm sequences, and the signature
//! condition on the members between them.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::field::Rationals;
use crate::pencil::Pencil;
use crate::poly::{PolyRing, P};
use crate::quadform::{signature_r, Signature};

fn sturm_chain(f: &P<Rationals>) -> Vec<P<Rationals>> {
    let r = PolyRing::new(&Rationals);
    let mut chain = vec![f.clone(), r.derivative(f)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let rem = r.rem(&chain[n - 2], &chain[n - 1]);
        if rem.is_zero() {
            break;
        }
        chain.push(r.neg(&rem));
    }
    chain
}

fn variations(chain: &[P<Rationals>], x: &BigRational) -> usize {
    let r = PolyRing::new(&Rationals);
    let signs: Vec<bool> = chain
        .iter()
        .map(|p| r.eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// A bound strictly larger than the absolute value of every root.
fn root_bound(f: &P<Rationals>) -> BigRational {
    let c = f.coeffs();
    let lc = c.last().expect("nonzero polynomial").abs();
    let max = c[..c.len() - 1].iter().map(|x| x.abs() / &lc).fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    max + BigRational::one()
}

/// Disjoint intervals (a, b), ordered left to right, each holding exactly one
/// real root of f with neither endpoint a root.
pub fn isolate_real_roots(f: &P<Rationals>) -> Vec<(BigRational, BigRational)> {
    let r = PolyRing::new(&Rationals);
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let chain = sturm_chain(f);
    let m = root_bound(f);
    let mut out = Vec::new();
    let mut stack = vec![(-m.clone(), m)];
    while let Some((a, b)) = stack.pop() {
        let count = variations(&chain, &a) - variations(&chain, &b);
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push((a, b));
            continue;
        }
        // a split point that is not a root; only finitely many fail
        let mut split = None;
        'search: for den in 2u32.. {
            for num in 1..den {
                let s = &a + (&b - &a) * BigRational::new(num.into(), den.into());
                if !r.eval(f, &s).is_zero() {
                    split = Some(s);
                    break 'search;
                }
            }
        }
        let s = split.expect("a polynomial has finitely many roots");
        stack.push((s.clone(), b));
        stack.push((a, s));
    }
    out.sort();
    out
}

/// One rational parameter in each component of the line minus the real roots
/// of f, from left to right.
pub fn sample_points(f: &P<Rationals>) -> Vec<BigRational> {
    let roots = isolate_real_roots(f);
    let m = root_bound(f);
    let mut out = vec![-m.clone()];
    for w in roots.windows(2) {
        out.push(w[0].1.clone());
    }
    if roots.is_empty() {
        out.push(BigRational::zero());
    }
    out.push(m);
    out
}

/// A member whose signature rules out a real n-dimensional isotropic
/// subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealWitness {
    pub t: BigRational,
    pub signature: Signature,
}

impl RealWitness {
    /// A definite member has no real zeros at all, so X(R) is empty.
    pub fn is_definite(&self) -> bool {
        self.signature.is_definite()
    }
}

/// Signatures at the sample points; the first one with min(pos, neg) < n is
/// returned as an obstruction.
pub fn signature_obstruction(p: &Pencil<Rationals>) -> Result<(Vec<(BigRational, Signature)>, Option<RealWitness>)> {
    let f = p.disc_poly();
    let mut samples = Vec::new();
    let mut witness = None;
    for t in sample_points(&f) {
        let sig = signature_r(&p.member(&t))?;
        if witness.is_none() && sig.positive.min(sig.negative) < p.n() {
            witness = Some(RealWitness { t: t.clone(), signature: sig });
        }
        samples.push((t, sig));
    }
    Ok((samples, witness))
}
