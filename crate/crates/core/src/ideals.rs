//! Ideals of O(μ) carried by a single right pseudo generator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::hurwitz::{units, HurwitzQuaternion};
use crate::orders::QuadraticOrder;
use crate::solutions::SolutionModule;

/// [a, b + ω], optionally scaled by an integer content c.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZBasis {
    #[serde(with = "crate::serde_int")]
    pub a: BigInt,
    #[serde(with = "crate::serde_int")]
    pub b: BigInt,
    #[serde(with = "crate::serde_int")]
    pub content: BigInt,
}

impl ZBasis {
    pub fn new<T: Into<BigInt>>(a: T, b: T) -> Self {
        ZBasis { a: a.into(), b: b.into(), content: BigInt::one() }
    }

    /// r²a | (rb + r − 1)² + m.
    pub fn is_valid(&self, order: &QuadraticOrder) -> bool {
        if self.a <= BigInt::zero() {
            return false;
        }
        let r = BigInt::from(order.r());
        let t = &r * &self.b + &r - 1u32;
        ((&t * &t + order.m()) % (&r * &r * &self.a)).is_zero()
    }

    /// Smallest b' ≡ b (mod a), b' ≥ 0, with a ≤ N(b' + ω).
    pub fn b_with_norm_condition(&self, order: &QuadraticOrder) -> BigInt {
        let mut b = self.b.clone();
        while order.b_plus_omega(&b).norm() < self.a {
            b += &self.a;
        }
        b
    }
}

impl fmt::Display for ZBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.content.is_one() {
            write!(f, "[{}, {} + ω]", self.a, self.b)
        } else {
            write!(f, "{}·[{}, {} + ω]", self.content, self.a, self.b)
        }
    }
}

/// An ideal of O(μ): content · R(ρ) with ρ primitive and canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IdealRepr", into = "IdealRepr")]
pub struct Ideal {
    order: QuadraticOrder,
    rho: HurwitzQuaternion,
    content: BigInt,
}

#[derive(Serialize, Deserialize)]
struct IdealRepr {
    order: QuadraticOrder,
    rho: HurwitzQuaternion,
    #[serde(with = "crate::serde_int")]
    content: BigInt,
}

impl TryFrom<IdealRepr> for Ideal {
    type Error = Error;
    fn try_from(r: IdealRepr) -> Result<Self> {
        let i = Ideal::from_generator(&r.order, &r.rho.scale(r.content.clone()))?;
        if i.rho != r.rho || i.content != r.content {
            return Err(Error::InternalInconsistency("stored pseudo generator is not canonical".into()));
        }
        Ok(i)
    }
}

impl From<Ideal> for IdealRepr {
    fn from(i: Ideal) -> Self {
        IdealRepr { order: i.order, rho: i.rho, content: i.content }
    }
}

/// Outcome of [`Ideal::check_identities`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub xi: HurwitzQuaternion,
    pub rho_relation: bool,
    pub xi_relation: bool,
    pub trace_relation: bool,
    pub norm_relation: bool,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.rho_relation && self.xi_relation && self.trace_relation && self.norm_relation
    }
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Real + rational·μ membership in O(μ).
fn in_order(q: &HurwitzQuaternion, order: &QuadraticOrder) -> bool {
    // q = s + tμ with s, t rational; q ∈ O(μ) ⇔ q is Hurwitz (already) and t·μ = vec(q).
    let mu = order.mu().doubled();
    let v = q.doubled();
    // 2t·(doubled μ) = doubled vec(q) componentwise → cross-ratio test.
    let mut ratio: Option<(BigInt, BigInt)> = None; // (num, den) with vec = num/den · μ
    for i in 1..4 {
        if mu[i].is_zero() {
            if !v[i].is_zero() {
                return false;
            }
            continue;
        }
        match &ratio {
            None => ratio = Some((v[i].clone(), mu[i].clone())),
            Some((n, d)) => {
                if n * mu[i] != v[i] * d {
                    return false;
                }
            }
        }
    }
    // Hurwitz elements of Q(μ) are exactly O(μ) (the order is maximal), except that for
    // r = 1 the element must have integer coordinates.
    order.r() == 2 || !q.is_half()
}

impl Ideal {
    /// The order itself.
    pub fn unit(order: &QuadraticOrder) -> Self {
        Ideal { order: order.clone(), rho: HurwitzQuaternion::one(), content: BigInt::one() }
    }

    /// From a Z-basis [a, b + ω]; b may be any representative mod a.
    pub fn from_z_basis(order: &QuadraticOrder, a: &BigInt, b: &BigInt) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidZBasis { a: a.clone(), b: b.clone(), reason: "a must be positive".into() });
        }
        let z = ZBasis { a: a.clone(), b: b.mod_floor(a), content: BigInt::one() };
        if !z.is_valid(order) {
            return Err(Error::InvalidZBasis { a: a.clone(), b: b.clone(), reason: "a does not divide N(b + ω)".into() });
        }
        let rho = HurwitzQuaternion::from_int(a.clone()).gcd_right(&order.b_plus_omega(&z.b))?;
        if rho.norm() != *a {
            return Err(Error::InternalInconsistency(format!("gcd_r({a}, {} + ω) has norm {}", z.b, rho.norm())));
        }
        Ok(Ideal { order: order.clone(), rho, content: BigInt::one() })
    }

    pub fn from_basis(order: &QuadraticOrder, z: &ZBasis) -> Result<Self> {
        let i = Self::from_z_basis(order, &z.a, &z.b)?;
        Ok(i.scaled(&z.content))
    }

    /// From any quaternion satisfying the pseudo-generator criterion (ρμρ⁻¹ integral, plus odd norm when m ≡ 3 mod 8).
    pub fn from_generator(order: &QuadraticOrder, rho: &HurwitzQuaternion) -> Result<Self> {
        let content = rho.content()?;
        let prim = rho.div_int(&content).expect("content divides");
        if !Self::is_pseudo_generator(order, &prim)? {
            return Err(Error::NotIntegral);
        }
        Ok(Ideal { order: order.clone(), rho: prim.canonical_left(), content })
    }

    /// ρμρ⁻¹ integral and, for m ≡ 3 (mod 8), N(ρ) odd.
    pub fn is_pseudo_generator(order: &QuadraticOrder, rho: &HurwitzQuaternion) -> Result<bool> {
        if order.mu().conjugate_by(rho)?.is_none() {
            return Ok(false);
        }
        let m8 = order.m().mod_floor(&BigInt::from(8));
        Ok(!(m8 == BigInt::from(3) && rho.norm().is_even()))
    }

    fn scaled(mut self, c: &BigInt) -> Self {
        self.content *= c;
        self
    }

    pub fn order(&self) -> &QuadraticOrder {
        &self.order
    }

    /// Primitive canonical pseudo generator.
    pub fn rho(&self) -> &HurwitzQuaternion {
        &self.rho
    }

    pub fn content(&self) -> &BigInt {
        &self.content
    }

    /// content · ρ.
    pub fn generator(&self) -> HurwitzQuaternion {
        self.rho.scale(self.content.clone())
    }

    pub fn primitive_part(&self) -> Self {
        Ideal { order: self.order.clone(), rho: self.rho.clone(), content: BigInt::one() }
    }

    /// N(ρ) of the primitive part.
    pub fn norm(&self) -> BigInt {
        self.rho.norm()
    }

    pub fn is_unit(&self) -> bool {
        self.rho.norm().is_one()
    }

    /// O(ρμρ⁻¹).
    pub fn right_order(&self) -> Result<QuadraticOrder> {
        let mu = self.order.mu().conjugate_by(&self.rho)?.ok_or(Error::NotIntegral)?;
        self.order.with_mu(&mu)
    }

    /// O(ρ'⁻¹μρ') for the left pseudo generator ρ'.
    pub fn left_order(&self) -> Result<QuadraticOrder> {
        let l = self.left_generator()?;
        let mu = self.order.mu().conjugate_by(&l.conjugate())?.ok_or(Error::NotIntegral)?;
        self.order.with_mu(&mu)
    }

    /// Z-basis of the ideal by its pseudo generator alone.
    pub fn restore_z_basis(&self) -> Result<ZBasis> {
        let b = restore_b(&self.order, &self.rho)?;
        Ok(ZBasis { a: self.norm(), b, content: self.content.clone() })
    }

    /// Left pseudo generator of this ideal, canonical up to right units.
    pub fn left_generator(&self) -> Result<HurwitzQuaternion> {
        left_from_right(&self.rho, &self.order)
    }

    /// ā: right pseudo generator obtained from the conjugated left one.
    pub fn conjugate(&self) -> Result<Self> {
        let rho = right_from_left(&self.rho.conjugate(), &self.order)?;
        Ok(Ideal { order: self.order.clone(), rho, content: self.content.clone() })
    }

    /// Product ideal; content recorded separately.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch);
        }
        let prod = multiply_generators(&self.rho, &other.rho, &self.order)?;
        let c = prod.content()?;
        let prim = prod.div_int(&c).expect("content divides");
        let out = Ideal { order: self.order.clone(), rho: prim.canonical_left(), content: c * &self.content * &other.content };
        debug_assert!(Self::is_pseudo_generator(&self.order, &out.rho).unwrap_or(false));
        Ok(out)
    }

    /// Solution module of ρμ = μ'ρ for μ' the right order of this ideal.
    pub fn solution_module(&self) -> Result<SolutionModule> {
        let mu_p = self.right_order()?;
        SolutionModule::solve(self.order.mu(), mu_p.mu())
    }

    /// The reduced ideal equivalent to the primitive part.
    pub fn reduce(&self) -> Result<Self> {
        let sm = self.solution_module()?;
        let v = sm.minimal_vector();
        let r = Ideal::from_generator(&self.order, &v)?;
        if !r.content.is_one() {
            return Err(Error::InternalInconsistency("minimal vector is imprimitive".into()));
        }
        Ok(r)
    }

    /// I = Ī.
    pub fn is_ambiguous_ideal(&self) -> Result<bool> {
        let p = self.primitive_part();
        let amb = p.conjugate()? == p;
        if amb {
            let two_mu = self.order.mu().scale(2 / self.order.r());
            if !HurwitzQuaternion::divides_right(&self.rho, &two_mu)? {
                return Err(Error::InternalInconsistency("ambiguous ideal fails the (2/r)μ divisibility".into()));
            }
        }
        Ok(amb)
    }

    /// [I]² = 1.
    pub fn is_ambiguous_class(&self) -> Result<bool> {
        let sq = self.primitive_part().multiply(&self.primitive_part())?;
        Ok(sq.primitive_part().reduce()?.is_unit())
    }

    /// Integer powers with reduction after each step.
    pub fn pow_reduced(&self, n: u64) -> Result<Self> {
        let mut acc = Ideal::unit(&self.order);
        let mut base = self.primitive_part().reduce()?;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.multiply(&base)?.primitive_part().reduce()?;
            }
            n >>= 1;
            if n > 0 {
                base = base.multiply(&base)?.primitive_part().reduce()?;
            }
        }
        Ok(acc)
    }

    /// The four identities around b + ω = ξρ, evaluated exactly.
    pub fn check_identities(&self) -> Result<IdentityReport> {
        let z = self.restore_z_basis()?;
        let rho = &self.rho;
        let bw = self.order.b_plus_omega(&z.b);
        let xi = bw.right_quotient(rho)?.ok_or_else(|| Error::InternalInconsistency("b + ω not divisible by ρ".into()))?;
        let mu = self.order.mu();
        let mu_p = mu.conjugate_by(rho)?.ok_or(Error::NotIntegral)?;
        let omega = self.order.omega();
        let r = BigInt::from(self.order.r());
        let shift = rat(z.b.clone()) + BigRational::new(&r - 1, r.clone());
        let (re_r, re_x) = (rho.real_part(), xi.real_part());
        let rho_relation = omega.scalar_product(rho) + &re_r * &shift == &re_x * rat(rho.norm());
        let xi_relation = omega.scalar_product(&xi) + &re_x * &shift == &re_r * rat(xi.norm());
        // ((ω + ω')/2, ω) = (m + (μ, μ'))/(2r²); the factor 2 is easy to lose.
        let lhs = (rat(self.order.m().clone()) + mu.scalar_product(&mu_p)) / rat(BigInt::from(2));
        let trace_relation = &lhs / rat(r.clone()) == &re_x * mu.scalar_product(rho) + &re_r * mu.scalar_product(&xi);
        let norm_relation = &lhs / rat(&r * &r)
            == &re_r * &re_r * xi.scalar_product(&xi)
                + rat(BigInt::from(2)) * &re_r * &re_x * rho.scalar_product(&xi)
                + &re_x * &re_x * rho.scalar_product(rho);
        Ok(IdentityReport { xi, rho_relation, xi_relation, trace_relation, norm_relation })
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.content.is_one() {
            write!(f, "R({}) in {}", self.rho, self.order)
        } else {
            write!(f, "{}·R({}) in {}", self.content, self.rho, self.order)
        }
    }
}

/// b for a primitive pseudo generator ρ of O(μ), following the unit/parity/gcd steps.
fn restore_b(order: &QuadraticOrder, rho: &HurwitzQuaternion) -> Result<BigInt> {
    let a = rho.norm();
    if a.is_one() {
        return Ok(BigInt::zero());
    }
    let mu = order.mu();
    let m = order.m();
    let r = order.r();
    // Step 1: units with Re(ερ) an odd integer; prefer the smallest d.
    let mut plans: Vec<(BigInt, BigInt, BigInt)> = Vec::new(); // (modulus, b0, d)
    for e in units() {
        let q = e * rho;
        let Some(c) = q.coords() else { continue };
        let re = &c[0];
        if re.is_even() {
            continue;
        }
        let sp = mu.scalar_product4(&q) / 4u32; // (μ, q): μ integral, q integral
        // Step 2: parity flag.
        let t: u32 = if a.is_even() && (m.is_odd() != sp.is_odd()) { 2 } else { 1 };
        if !(&a % t).is_zero() {
            continue;
        }
        // Step 3.
        let d = re.gcd(&(&a / t));
        if !(&sp % &d).is_zero() {
            continue;
        }
        let modulus = &a / t / &d;
        // Step 4: rb + r − 1 ≡ −(sp/d)(re/d)⁻¹.
        let Some(inv) = inv_mod(&(re / &d), &modulus) else { continue };
        let rhs = (-(&sp / &d) * inv).mod_floor(&modulus);
        let b0 = if r == 1 {
            rhs
        } else {
            match inv_mod(&BigInt::from(2), &modulus) {
                Some(h) => ((rhs - 1u32) * h).mod_floor(&modulus),
                None => continue,
            }
        };
        plans.push((modulus, b0, d));
    }
    plans.sort_by(|x, y| x.2.cmp(&y.2));
    for (modulus, b0, _) in &plans {
        if modulus.is_zero() {
            continue;
        }
        // When td > 1 the congruence only fixes b modulo a/(td); test the lifts.
        let mut b = b0.clone();
        while b < a {
            let bw = order.b_plus_omega(&b);
            if (bw.norm() % &a).is_zero() && bw.right_quotient(rho)?.is_some() {
                return Ok(b);
            }
            b += modulus;
        }
    }
    Err(Error::InternalInconsistency(format!("no Z-basis found for ρ = {rho}")))
}

/// Candidates −(μ, ρ) + Re(ρ)μ' (and the a/2 shift) over all associates of ρ.
fn eq9_candidates(
    associates: impl Iterator<Item = HurwitzQuaternion>,
    mu: &HurwitzQuaternion,
    mu_target: &HurwitzQuaternion,
    a: &BigInt,
) -> Vec<HurwitzQuaternion> {
    let mut out = Vec::new();
    for q in associates {
        // Work with 4× the coordinates: real −4(μ, q) (+2a), vector Re(2q)·(2μ').
        let sp4 = mu.scalar_product4(&q);
        let md = mu_target.doubled();
        let mut shifts = vec![BigInt::zero()];
        if a.is_even() {
            shifts.push(a.clone());
        }
        for s in shifts {
            let re2 = -&sp4 + &s * 2;
            let vec2: Vec<BigInt> = md[1..].iter().map(|v| q.trace() * *v).collect();
            let all = [re2, vec2[0].clone(), vec2[1].clone(), vec2[2].clone()];
            if all.iter().any(|v| !(v % 2u32).is_zero()) {
                continue;
            }
            if let Ok(h) = HurwitzQuaternion::from_doubled(&all[0] / 2, &all[1] / 2, &all[2] / 2, &all[3] / 2) {
                out.push(h);
            }
        }
    }
    out
}

/// Right pseudo generator from a left one.
pub fn right_from_left(rho_left: &HurwitzQuaternion, order: &QuadraticOrder) -> Result<HurwitzQuaternion> {
    let a = rho_left.norm();
    if a.is_zero() {
        return Err(Error::ZeroQuaternion);
    }
    let mu = order.mu();
    let mut gens = vec![HurwitzQuaternion::from_int(a.clone())];
    for c in eq9_candidates(units().iter().map(|e| rho_left * e), mu, mu, &a) {
        if in_order(&c, order) && HurwitzQuaternion::divides_left(rho_left, &c)? {
            gens.push(c);
        }
    }
    let g = HurwitzQuaternion::gcd_right_all(gens.iter())?;
    if g.norm() != a {
        return Err(Error::InternalInconsistency(format!("left→right conversion produced norm {} ≠ {a}", g.norm())));
    }
    Ok(g)
}

/// Left pseudo generator from a right one (mirror through conjugation).
pub fn left_from_right(rho: &HurwitzQuaternion, order: &QuadraticOrder) -> Result<HurwitzQuaternion> {
    Ok(right_from_left(&rho.conjugate(), order)?.conjugate().canonical_right())
}

/// ρ''·ρ₂ for the product of R(ρ₁) and R(ρ₂).
fn multiply_generators(rho1: &HurwitzQuaternion, rho2: &HurwitzQuaternion, order: &QuadraticOrder) -> Result<HurwitzQuaternion> {
    let a = rho1.norm();
    let mu = order.mu();
    let mu_p = mu.conjugate_by(rho2)?.ok_or(Error::NotIntegral)?;
    let inv2 = rho2.conjugate();
    let n2 = rho2.norm();
    let mut gens = vec![HurwitzQuaternion::from_int(a.clone())];
    for c in eq9_candidates(units().iter().map(|e| e * rho1), mu, &mu_p, &a) {
        // pull back into O(μ): ρ₂⁻¹ c ρ₂
        let Some(back) = (&(&inv2 * &c) * rho2).div_int(&n2) else { continue };
        if in_order(&back, order) && HurwitzQuaternion::divides_right(rho1, &back)? {
            gens.push(c);
        }
    }
    let g = HurwitzQuaternion::gcd_right_all(gens.iter())?;
    Ok(&g * rho2)
}
