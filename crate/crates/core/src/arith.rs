//! Small integer helpers shared by the other modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// ⌊x⌉ = ⌊x + 1/2⌋.
pub fn round_half_up(x: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (x + half).floor().to_integer()
}

/// ⌊(n/d)⌉ for integers, d ≠ 0.
pub fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
    (n * 2u32 + &d).div_floor(&(d * 2u32))
}

pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = isqrt(n);
    &s * &s == *n
}

/// Trial-division factorization into (prime, exponent) pairs; `n` must be nonzero.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut push = |p: BigInt, n: &mut BigInt| {
        let mut e = 0;
        while (&*n % &p).is_zero() {
            *n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(BigInt::from(2), &mut n);
    let mut p = BigInt::from(3);
    while &p * &p <= n {
        push(p.clone(), &mut n);
        p += 2;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: &BigInt) -> bool {
    !n.is_zero() && factorize(n).iter().all(|(_, e)| *e == 1)
}

pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let f = factorize(n);
    f.len() == 1 && f[0].1 == 1
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// Squarefree-ness for every n ≤ limit (index 0 unused).
pub fn squarefree_sieve(limit: u64) -> Vec<bool> {
    let mut sf = vec![true; limit as usize + 1];
    let mut p = 2u64;
    while p * p <= limit {
        let sq = p * p;
        let mut k = sq;
        while k <= limit {
            sf[k as usize] = false;
            k += sq;
        }
        p += 1;
    }
    if !sf.is_empty() {
        sf[0] = false;
    }
    sf
}

/// Extended gcd: (g, s, t) with s·u + t·v = g ≥ 0.
pub fn ext_gcd(u: &BigInt, v: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (u.clone(), v.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of u modulo n (n ≥ 1), if it exists; result in [0, n).
pub fn inv_mod(u: &BigInt, n: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(&u.mod_floor(n), n);
    g.is_one().then(|| s.mod_floor(n))
}

/// Convenience for code paths that know the value fits.
pub fn to_u64(n: &BigInt) -> u64 {
    n.to_u64().expect("value does not fit in u64")
}
