//! The lattice of all ρ with ρμ = μ'ρ for two pure quaternions of equal norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, round_div};
use crate::error::{Error, Result};
use crate::hurwitz::HurwitzQuaternion;

/// Z-basis [υ, υ₁] of the solution set of ρμ = μ'ρ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionModule {
    pub first: HurwitzQuaternion,
    pub second: HurwitzQuaternion,
    pub mu: HurwitzQuaternion,
    pub mu_prime: HurwitzQuaternion,
}

/// g = gcd(u, v, w) = a·u + b·v + c·w.
pub fn ext_gcd3(u: &BigInt, v: &BigInt, w: &BigInt) -> Result<(BigInt, BigInt, BigInt, BigInt)> {
    if u.is_zero() && v.is_zero() && w.is_zero() {
        return Err(Error::AllZero);
    }
    let (g1, s1, t1) = ext_gcd(u, v);
    let (g, s2, t2) = ext_gcd(&g1, w);
    Ok((g, &s2 * &s1, &s2 * &t1, t2))
}

fn vector(q: &HurwitzQuaternion) -> Result<[BigInt; 3]> {
    if !q.is_pure() {
        return Err(Error::NotPure);
    }
    q.int_vector().ok_or(Error::NotPure)
}

fn satisfies(rho: &HurwitzQuaternion, mu: &HurwitzQuaternion, mu_prime: &HurwitzQuaternion) -> bool {
    rho * mu == mu_prime * rho
}

/// υ₁ − k·step·υ with the integer k that makes |(υ, υ₁)| smallest. A zero step leaves υ₁ alone.
fn size_reduce(first: &HurwitzQuaternion, second: &HurwitzQuaternion, step: &BigInt) -> HurwitzQuaternion {
    if step.is_zero() {
        return second.clone();
    }
    let dot = |p: &HurwitzQuaternion, q: &HurwitzQuaternion| p.doubled()[0] * q.doubled()[0] + p.scalar_product4(q);
    let unit = first.scale(step.abs());
    let k = round_div(&dot(&unit, second), &dot(&unit, &unit));
    second - &unit.scale(k)
}

impl SolutionModule {
    /// Builds [υ, υ₁] for ρμ = μ'ρ.
    pub fn solve(mu: &HurwitzQuaternion, mu_prime: &HurwitzQuaternion) -> Result<Self> {
        let v = vector(mu)?;
        let w = vector(mu_prime)?;
        let m = mu.norm();
        if m != mu_prime.norm() {
            return Err(Error::NormMismatch(m, mu_prime.norm()));
        }
        if m.is_zero() {
            return Err(Error::ZeroQuaternion);
        }
        let (first, second) = if *mu_prime == -mu { Self::anti(&v)? } else { Self::general(&m, &v, &w)? };
        let sm = SolutionModule { first, second, mu: mu.clone(), mu_prime: mu_prime.clone() };
        for b in [&sm.first, &sm.second] {
            if !satisfies(b, mu, mu_prime) {
                return Err(Error::InternalInconsistency(format!("basis vector {b} does not solve ρμ = μ'ρ")));
            }
        }
        Ok(sm)
    }

    /// μ' = −μ: υ = (zj − yk)/d, υ₁ = −di + x(ej + fk).
    fn anti(v: &[BigInt; 3]) -> Result<(HurwitzQuaternion, HurwitzQuaternion)> {
        let [x, y, z] = v;
        if y.is_zero() && z.is_zero() {
            // μ = ±xi: the j, k plane.
            return Ok((HurwitzQuaternion::pure(0, 1, 0), HurwitzQuaternion::pure(0, 0, 1)));
        }
        let (d, e, f) = ext_gcd(y, z);
        let first = HurwitzQuaternion::pure(BigInt::zero(), z / &d, -(y / &d));
        let second = HurwitzQuaternion::pure(-&d, x * &e, x * &f);
        // Other Bézout pairs (e, f) move υ₁ by multiples of x·υ; take the shortest.
        let second = size_reduce(&first, &second, x);
        Ok((first, second))
    }

    fn general(m: &BigInt, v: &[BigInt; 3], w: &[BigInt; 3]) -> Result<(HurwitzQuaternion, HurwitzQuaternion)> {
        let s: Vec<BigInt> = (0..3).map(|i| &w[i] + &v[i]).collect();
        let t: Vec<BigInt> = (0..3).map(|i| &w[i] - &v[i]).collect();
        let (d, a, b, c) = ext_gcd3(&s[0], &s[1], &s[2])?;
        let e = s.iter().chain(t.iter()).fold(BigInt::zero(), |g, x| g.gcd(x));
        let first = HurwitzQuaternion::pure(&s[0] / &d, &s[1] / &d, &s[2] / &d);
        let p = &c * &t[1] - &b * &t[2];
        let q = &a * &t[2] - &c * &t[0];
        let r = &b * &t[0] - &a * &t[1];
        let big = HurwitzQuaternion::new(-&d, p, q, r)
            .div_int(&e)
            .ok_or_else(|| Error::InternalInconsistency("Υ is not integral".into()))?;
        let coef = [a, b, c];
        let m8 = m.mod_floor(&BigInt::from(8));
        let m4 = m.mod_floor(&BigInt::from(4));
        let four = BigInt::from(4);
        let k: Option<BigInt> = if m4 == BigInt::one() || m4 == BigInt::from(2) {
            // (a): exactly one even sum; its own coefficient + 1.
            let even: Vec<usize> = (0..3).filter(|&i| s[i].is_even()).collect();
            (even.len() == 1).then(|| &coef[even[0]] + 1)
        } else if m8 == BigInt::from(3) {
            let r4: Vec<BigInt> = s.iter().map(|x| x.mod_floor(&four)).collect();
            let twos: Vec<usize> = (0..3).filter(|&i| r4[i] == BigInt::from(2)).collect();
            let zeros = r4.iter().filter(|x| x.is_zero()).count();
            if twos.len() == 1 && zeros == 2 {
                // (b): the other two coefficients + 1.
                let i = twos[0];
                Some(&coef[(i + 1) % 3] + &coef[(i + 2) % 3] + 1)
            } else if twos.len() == 3 {
                // (c)
                Some(BigInt::one())
            } else {
                None
            }
        } else {
            None
        };
        let second = match k {
            None => big,
            Some(k) => (&big + &first.scale(k))
                .div_int(&BigInt::from(2))
                .ok_or_else(|| Error::InternalInconsistency("half-integral υ₁ is not Hurwitz".into()))?,
        };
        // ext_gcd3 leaves |B| far above N(υ); the module is unchanged by shifting υ₁ along υ.
        let second = size_reduce(&first, &second, &BigInt::one());
        Ok((first, second))
    }

    /// υX + υ₁Y.
    pub fn element(&self, x: &BigInt, y: &BigInt) -> HurwitzQuaternion {
        &self.first.scale(x.clone()) + &self.second.scale(y.clone())
    }

    /// (N(υ), 2(υ, υ₁)×, N(υ₁)).
    pub fn norm_form(&self) -> (BigInt, BigInt, BigInt) {
        (self.first.norm(), full_dot2(&self.first, &self.second), self.second.norm())
    }

    /// Coordinates (X, Y) of ρ in the basis, when ρ lies in the lattice.
    pub fn coordinates(&self, rho: &HurwitzQuaternion) -> Option<(BigInt, BigInt)> {
        let u = self.first.doubled();
        let u1 = self.second.doubled();
        let r = rho.doubled();
        // Pick two coordinates where the 2×2 minor is nonzero.
        for i in 0..4 {
            for j in i + 1..4 {
                let det = u[i] * u1[j] - u[j] * u1[i];
                if det.is_zero() {
                    continue;
                }
                let xn = r[i] * u1[j] - r[j] * u1[i];
                let yn = u[i] * r[j] - u[j] * r[i];
                if !(&xn % &det).is_zero() || !(&yn % &det).is_zero() {
                    return None;
                }
                let (x, y) = (xn / &det, yn / &det);
                return (self.element(&x, &y) == *rho).then_some((x, y));
            }
        }
        None
    }

    /// Shortest nonzero lattice vector.
    pub fn minimal_vector(&self) -> HurwitzQuaternion {
        self.minimal_vector_traced().0
    }

    /// Shortest vector plus the number of reduction rounds taken.
    pub fn minimal_vector_traced(&self) -> (HurwitzQuaternion, u32) {
        let (mut u, mut u1) = (self.first.clone(), self.second.clone());
        if u.norm() > u1.norm() {
            std::mem::swap(&mut u, &mut u1);
        }
        let mut iterations = 0;
        loop {
            let n = u.norm();
            let x = round_div(&full_dot2(&u, &u1), &(&n * 2));
            u1 = &u1 - &u.scale(x);
            iterations += 1;
            if u1.norm() < n {
                std::mem::swap(&mut u, &mut u1);
            } else {
                break;
            }
        }
        log::trace!("lattice reduction finished after {iterations} rounds");
        let (n, n1) = (u.norm(), u1.norm());
        let s2 = full_dot2(&u, &u1);
        if n == n1 && s2.abs() >= n {
            // Tie between several shortest vectors: step back by ±υ keeping the norm.
            let cand = if s2.is_positive() { &u1 - &u } else { &u1 + &u };
            debug_assert_eq!(cand.norm(), n);
            return (cand, iterations);
        }
        (u, iterations)
    }
}

/// 2(q, r)× as an integer.
fn full_dot2(q: &HurwitzQuaternion, r: &HurwitzQuaternion) -> BigInt {
    let a = q.doubled();
    let b = r.doubled();
    let s: BigInt = (0..4).map(|i| a[i] * b[i]).sum();
    debug_assert!(s.is_even());
    s / 2
}
