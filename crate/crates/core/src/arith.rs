//! Integer helpers: primality, small factorizations, valuations.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors, ascending.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes up to `bound`, inclusive.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime_u64(n)).collect()
}

/// Result of factoring an integer by trial division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntFactorization {
    pub primes: Vec<(u64, u32)>,
    /// Cofactor left over once the trial bound was reached (1 when fully factored).
    pub cofactor: BigUint,
}

impl IntFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }
}

const TRIAL_BOUND: u64 = 1_000_000;

/// Factors |n| by trial division up to 10^6; a remaining cofactor below 2^64
/// that passes Miller-Rabin is accepted as prime.
pub fn factor_bigint(n: &BigInt) -> IntFactorization {
    let mut m = n.magnitude().clone();
    let mut primes = Vec::new();
    if m.is_zero() {
        return IntFactorization { primes, cofactor: m };
    }
    let mut d = 2u64;
    while d <= TRIAL_BOUND {
        let dd = BigUint::from(d);
        if &dd * &dd > m {
            break;
        }
        let mut e = 0;
        while (&m % &dd).is_zero() {
            m /= &dd;
            e += 1;
        }
        if e > 0 {
            primes.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        if let Some(small) = m.to_u64() {
            let dd = BigUint::from(d);
            if &dd * &dd > m || is_prime_u64(small) {
                primes.push((small, 1));
                primes.sort();
                m = BigUint::one();
            }
        }
    }
    IntFactorization { primes, cofactor: m }
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// Splits n = p^v * u with p not dividing u.
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p).expect("nonzero");
    let u = n / BigInt::from(p).pow(v);
    (v, u)
}

/// Legendre symbol (a/p) for odd prime p, in {-1, 0, 1}.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Squarefree part of a nonzero integer, sign kept.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    let f = factor_bigint(n);
    let mut out = BigInt::from(if n.sign() == Sign::Minus { -1 } else { 1 });
    for (p, e) in f.primes {
        if e % 2 == 1 {
            out *= BigInt::from(p);
        }
    }
    out * BigInt::from_biguint(Sign::Plus, f.cofactor)
}

/// Integer square root test.
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}
