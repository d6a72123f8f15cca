//! Positive definite binary quadratic forms: reduction, composition, class groups.
//!
//! Nothing in here touches quaternions except [`ideal_to_form`] and
//! [`form_to_ideal`], so the rest of the crate can be checked against it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use crate::arith::ext_gcd;
use crate::arith::{factorize, inv_mod};
use crate::error::{Error, Result};
use crate::ideals::{Ideal, ZBasis};
use crate::orders::QuadraticOrder;
use crate::solutions::ext_gcd3;

/// ax² + bxy + cy².
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryQuadraticForm {
    #[serde(with = "crate::serde_int")]
    pub a: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b: BigInt,
    #[serde(with = "crate::serde_int")]
    pub c: BigInt,
}

/// Integer 2×2 matrix [[p, q], [r, s]] acting by x = px' + qy', y = rx' + sy'.
pub type Transform = [[BigInt; 2]; 2];

fn mat_mul(m: &Transform, n: &Transform) -> Transform {
    [
        [&m[0][0] * &n[0][0] + &m[0][1] * &n[1][0], &m[0][0] * &n[0][1] + &m[0][1] * &n[1][1]],
        [&m[1][0] * &n[0][0] + &m[1][1] * &n[1][0], &m[1][0] * &n[0][1] + &m[1][1] * &n[1][1]],
    ]
}

impl BinaryQuadraticForm {
    pub fn new<T: Into<BigInt>>(a: T, b: T, c: T) -> Self {
        BinaryQuadraticForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - &self.a * &self.c * 4
    }

    pub fn is_positive_definite(&self) -> bool {
        self.discriminant().is_negative() && self.a.is_positive()
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// The form f(px + qy, rx + sy).
    pub fn transform(&self, t: &Transform) -> Self {
        let [[p, q], [r, s]] = t;
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = &self.a * p * q * 2 + &self.b * (p * s + q * r) + &self.c * r * s * 2;
        BinaryQuadraticForm { a, b, c }
    }

    /// |b| ≤ a ≤ c, with b ≥ 0 when |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        ab <= self.a && self.a <= self.c && (!(ab == self.a || self.a == self.c) || !self.b.is_negative())
    }

    pub fn reduce(&self) -> Result<Self> {
        Ok(self.reduce_with_transform()?.0)
    }

    /// Reduced form plus the unimodular transform (det = 1) taking `self` to it.
    pub fn reduce_with_transform(&self) -> Result<(Self, Transform)> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = self.discriminant();
        let (mut a, mut b) = (self.a.clone(), self.b.clone());
        let mut t: Transform = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
        loop {
            // b into (−a, a]
            let k = (&a - &b).div_floor(&(&a * 2));
            if !k.is_zero() {
                b += &a * &k * 2;
                t = mat_mul(&t, &[[BigInt::one(), k], [BigInt::zero(), BigInt::one()]]);
            }
            let c = (&b * &b - &d) / (&a * 4);
            if a > c || (a == c && b.is_negative()) {
                // (a, b, c) → (c, −b, a)
                a = c;
                b = -b;
                t = mat_mul(&t, &[[BigInt::zero(), -BigInt::one()], [BigInt::one(), BigInt::zero()]]);
                continue;
            }
            let f = BinaryQuadraticForm { a, b, c };
            debug_assert!(f.is_reduced());
            return Ok((f, t));
        }
    }

    /// (1, 0, −Δ/4) or (1, 1, (1 − Δ)/4).
    pub fn principal(disc: &BigInt) -> Result<Self> {
        check_discriminant(disc)?;
        let b = disc.mod_floor(&BigInt::from(2));
        let c = (&b * &b - disc) / 4;
        Ok(BinaryQuadraticForm { a: BigInt::one(), b, c })
    }

    pub fn is_principal(&self) -> Result<bool> {
        Ok(self.reduce()?.a.is_one())
    }

    pub fn inverse(&self) -> Self {
        BinaryQuadraticForm { a: self.a.clone(), b: -&self.b, c: self.c.clone() }
    }

    /// Gauss composition (Dirichlet's united forms), reduced.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let d = self.discriminant();
        if d != g.discriminant() {
            return Err(Error::DiscriminantMismatch(d, g.discriminant()));
        }
        let (a1, b1) = (&self.a, &self.b);
        let (a2, b2) = (&g.a, &g.b);
        let half = (b1 + b2) / 2u32;
        let (e, u, v, w) = ext_gcd3(a1, a2, &half)?;
        let a3 = a1 * a2 / (&e * &e);
        let num = &u * a1 * b2 + &v * a2 * b1 + &w * ((b1 * b2 + &d) / 2u32);
        let b3 = (num / &e).mod_floor(&(&a3 * 2u32));
        let c3 = (&b3 * &b3 - &d) / (&a3 * 4u32);
        BinaryQuadraticForm { a: a3, b: b3, c: c3 }.reduce()
    }

    pub fn pow(&self, n: u64) -> Result<Self> {
        let mut acc = Self::principal(&self.discriminant())?;
        let mut base = self.reduce()?;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            base = base.compose(&base)?;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Order in the class group, by repeated composition.
    pub fn order(&self) -> Result<u64> {
        let f = self.reduce()?;
        let mut acc = f.clone();
        let mut n = 1;
        while !acc.a.is_one() {
            acc = acc.compose(&f)?;
            n += 1;
        }
        Ok(n)
    }

    /// An ambiguous reduced form: b = 0, a = b, or a = c.
    pub fn is_ambiguous(&self) -> bool {
        self.b.is_zero() || self.a == self.b || self.a == self.c
    }
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_discriminant(d: &BigInt) -> Result<()> {
    let r = d.mod_floor(&BigInt::from(4));
    if !d.is_negative() || !(r.is_zero() || r.is_one()) {
        return Err(Error::InvalidDiscriminant(d.clone()));
    }
    Ok(())
}

/// All reduced primitive forms of discriminant Δ < 0.
pub fn reduced_forms(disc: &BigInt) -> Result<Vec<BinaryQuadraticForm>> {
    check_discriminant(disc)?;
    let n = -disc;
    let mut out = Vec::new();
    let mut a = BigInt::one();
    while &a * &a * 3u32 <= n {
        let mut b = -&a + 1u32;
        while b <= a {
            let num = &b * &b - disc;
            if (&num % (&a * 4u32)).is_zero() {
                let f = BinaryQuadraticForm { a: a.clone(), b: b.clone(), c: num / (&a * 4u32) };
                if f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
            b += 1;
        }
        a += 1;
    }
    Ok(out)
}

pub fn class_number(disc: &BigInt) -> Result<u64> {
    Ok(reduced_forms(disc)?.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupDescription {
    #[serde(with = "crate::serde_int")]
    pub discriminant: BigInt,
    pub h: u64,
    /// Invariant factors m₁ ≥ m₂ ≥ … with m_{j+1} | m_j.
    pub elementary_divisors: Vec<u64>,
}

pub fn class_group(disc: &BigInt) -> Result<ClassGroupDescription> {
    let forms = reduced_forms(disc)?;
    let h = forms.len() as u64;
    let index: HashMap<BinaryQuadraticForm, usize> = forms.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    // Orders via repeated composition, reusing the table of reduced forms.
    let mut orders = vec![0u64; forms.len()];
    for (i, f) in forms.iter().enumerate() {
        if orders[i] != 0 {
            continue;
        }
        let mut acc = f.clone();
        let mut n = 1;
        while !acc.a.is_one() {
            acc = acc.compose(f)?;
            n += 1;
        }
        orders[i] = n;
        debug_assert!(index.contains_key(&acc));
    }
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (p, _) in factorize(&BigInt::from(h)) {
        let p = p.to_u64().expect("small prime");
        // s_k = log_p #{x : x^(p^k) = 1}
        let mut s = vec![0u32];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let count = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
            let sk = (count as f64).log(p as f64).round() as u32;
            if sk == *s.last().unwrap() {
                break;
            }
            s.push(sk);
        }
        // number of cyclic factors of order ≥ p^k is s_k − s_{k−1}
        let ge: Vec<u32> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let mut exps = Vec::new();
        for j in 0..ge.first().copied().unwrap_or(0) {
            exps.push(ge.iter().filter(|&&g| g > j).count() as u32);
        }
        per_prime.insert(p, exps);
    }
    let width = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
    let mut divisors = vec![1u64; width];
    for (p, exps) in &per_prime {
        for (j, e) in exps.iter().enumerate() {
            divisors[j] *= p.pow(*e);
        }
    }
    if divisors.is_empty() {
        divisors.push(1);
    }
    Ok(ClassGroupDescription { discriminant: disc.clone(), h, elementary_divisors: divisors })
}

/// Some x with x² ≡ a (mod n), if one exists.
pub fn sqrt_mod(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    if !n.is_positive() {
        return None;
    }
    if n.is_one() {
        return Some(BigInt::zero());
    }
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for (p, e) in factorize(n) {
        let pe = p.pow(e);
        let root = sqrt_mod_prime_power(&a.mod_floor(&pe), &p, e)?;
        // CRT merge
        let inv = inv_mod(&modulus, &pe).expect("coprime moduli");
        let t = ((&root - &x) * inv).mod_floor(&pe);
        x += &modulus * t;
        modulus *= &pe;
    }
    Some(x.mod_floor(n))
}

fn sqrt_mod_prime_power(a: &BigInt, p: &BigInt, e: u32) -> Option<BigInt> {
    // Lift the full root set level by level; the sets stay tiny.
    let mut roots: Vec<BigInt> = roots_mod_prime(&a.mod_floor(p), p);
    let mut pk = p.clone();
    for _ in 1..e {
        let next = &pk * p;
        let target = a.mod_floor(&next);
        let mut lifted = Vec::new();
        for r in &roots {
            let two_r = r * 2u32;
            if p != &BigInt::from(2) && !(&two_r % p).is_zero() {
                // Hensel: r − (r² − a)/(2r)
                let inv = inv_mod(&two_r, &next).expect("2r invertible");
                let nr = (r - (r * r - &target) * inv).mod_floor(&next);
                lifted.push(nr);
            } else {
                let mut t = BigInt::zero();
                while &t < p {
                    let c = r + &t * &pk;
                    if ((&c * &c - &target) % &next).is_zero() {
                        lifted.push(c.mod_floor(&next));
                    }
                    t += 1;
                }
            }
        }
        lifted.sort();
        lifted.dedup();
        roots = lifted;
        pk = next;
        if roots.is_empty() {
            return None;
        }
    }
    roots.into_iter().next()
}

fn roots_mod_prime(a: &BigInt, p: &BigInt) -> Vec<BigInt> {
    if a.is_zero() {
        return vec![BigInt::zero()];
    }
    if p == &BigInt::from(2) {
        return vec![a.clone()];
    }
    let exp = (p - 1u32) / 2u32;
    if a.modpow(&exp, p) != BigInt::one() {
        return Vec::new();
    }
    let r = tonelli_shanks(a, p);
    let other = (p - &r).mod_floor(p);
    if other == r {
        vec![r]
    } else {
        vec![r.clone().min(other.clone()), r.max(other)]
    }
}

fn tonelli_shanks(a: &BigInt, p: &BigInt) -> BigInt {
    let one = BigInt::one();
    let pm1: BigInt = p - 1u32;
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while z.modpow(&(&pm1 / 2u32), p) != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) / 2u32), p);
    while t != one {
        let mut i = 0;
        let mut tt = t.clone();
        while tt != one {
            tt = &tt * &tt % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = &b * &b % p;
        t = &t * &c % p;
        r = &r * &b % p;
    }
    r
}

/// Form of [a, b + ω]: b + ω = (−B + √Δ)/2.
pub fn zbasis_to_form(order: &QuadraticOrder, z: &ZBasis) -> BinaryQuadraticForm {
    let disc = order.discriminant();
    let big_b = -(&z.b * 2u32 + (order.r() - 1));
    let c = (&big_b * &big_b - &disc) / (&z.a * 4);
    BinaryQuadraticForm { a: z.a.clone(), b: big_b, c }
}

/// Form attached to the primitive part of an ideal.
pub fn ideal_to_form(ideal: &Ideal) -> Result<BinaryQuadraticForm> {
    let z = ideal.restore_z_basis()?;
    Ok(zbasis_to_form(ideal.order(), &z))
}

/// Ideal [a, b + ω] of O(μ) for a primitive form of the order's discriminant.
pub fn form_to_ideal(order: &QuadraticOrder, f: &BinaryQuadraticForm) -> Result<Ideal> {
    if f.discriminant() != order.discriminant() {
        return Err(Error::DiscriminantMismatch(f.discriminant(), order.discriminant()));
    }
    let num = -&f.b - (order.r() - 1);
    let b = (num / 2u32).mod_floor(&f.a);
    Ideal::from_z_basis(order, &f.a, &b)
}

/// Smallest positive value of the form, by reduction.
pub fn form_minimum(f: &BinaryQuadraticForm) -> Result<BigInt> {
    Ok(f.reduce()?.a)
}

/// ⌈(1/π)·√|Δ|·ln|Δ|⌉.
pub fn class_number_bound(disc: &BigInt) -> u64 {
    let d = disc.abs().to_f64().unwrap_or(f64::MAX).max(3.0);
    (d.sqrt() * d.ln() / std::f64::consts::PI).ceil() as u64
}
