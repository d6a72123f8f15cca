//! Quadratic orders `O(μ) = [1, ω]` inside the Hurwitz quaternions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, isqrt};
use crate::error::{Error, Result};
use crate::hurwitz::{units, HurwitzQuaternion};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OrderRepr", into = "OrderRepr")]
pub struct QuadraticOrder {
    mu: HurwitzQuaternion,
    m: BigInt,
    r: u32,
    omega: HurwitzQuaternion,
}

#[derive(Serialize, Deserialize)]
struct OrderRepr {
    mu: HurwitzQuaternion,
    #[serde(with = "crate::serde_int")]
    m: BigInt,
    r: u32,
    omega: HurwitzQuaternion,
}

impl TryFrom<OrderRepr> for QuadraticOrder {
    type Error = Error;
    fn try_from(r: OrderRepr) -> Result<Self> {
        let o = QuadraticOrder::from_mu(&r.mu)?;
        if o.m != r.m || o.r != r.r || o.omega != r.omega {
            return Err(Error::InvalidOrder("stored m, r or ω disagree with μ".into()));
        }
        Ok(o)
    }
}

impl From<QuadraticOrder> for OrderRepr {
    fn from(o: QuadraticOrder) -> Self {
        OrderRepr { mu: o.mu, m: o.m, r: o.r, omega: o.omega }
    }
}

/// Sign class of an order: some unit conjugate of μ has all coordinates ≥ 0 (or ≤ 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Both,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "P",
            Sign::Negative => "N",
            Sign::Both => "B",
        })
    }
}

impl QuadraticOrder {
    pub fn make<T: Into<BigInt>>(x: T, y: T, z: T) -> Result<Self> {
        Self::from_mu(&HurwitzQuaternion::pure(x, y, z))
    }

    /// Validates μ: pure, integral, N(μ) squarefree and ≢ 7 (mod 8).
    pub fn from_mu(mu: &HurwitzQuaternion) -> Result<Self> {
        let v = Self::int_vector(mu)?;
        let m = mu.norm();
        if m.is_zero() {
            return Err(Error::InvalidOrder("μ = 0".into()));
        }
        if (&m % 8u32) == BigInt::from(7) {
            return Err(Error::InvalidOrder(format!("m = {m} ≡ 7 (mod 8)")));
        }
        if !is_squarefree(&m) {
            return Err(Error::InvalidOrder(format!("m = {m} is not squarefree")));
        }
        let g = v[0].gcd(&v[1]).gcd(&v[2]);
        if g != BigInt::from(1) {
            return Err(Error::InvalidOrder("μ is imprimitive".into()));
        }
        Ok(Self::assemble(mu.clone(), m))
    }

    /// Same m, new μ — used when moving between orders of one class of embeddings.
    pub fn with_mu(&self, mu: &HurwitzQuaternion) -> Result<Self> {
        Self::int_vector(mu)?;
        let n = mu.norm();
        if n != self.m {
            return Err(Error::NormMismatch(self.m.clone(), n));
        }
        Ok(Self::assemble(mu.clone(), n))
    }

    fn int_vector(mu: &HurwitzQuaternion) -> Result<[BigInt; 3]> {
        if !mu.is_pure() {
            return Err(Error::NotPure);
        }
        mu.int_vector().ok_or(Error::NotPure)
    }

    fn assemble(mu: HurwitzQuaternion, m: BigInt) -> Self {
        let r = if (&m % 4u32) == BigInt::from(3) { 2 } else { 1 };
        let omega = if r == 2 {
            // (1 + μ)/2: μ has odd coordinates here.
            let [_, b, c, d] = mu.doubled().map(|v| v / 2);
            HurwitzQuaternion::from_doubled(1.into(), b, c, d).expect("odd coordinates when m ≡ 3 (mod 4)")
        } else {
            mu.clone()
        };
        QuadraticOrder { mu, m, r, omega }
    }

    pub fn mu(&self) -> &HurwitzQuaternion {
        &self.mu
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn omega(&self) -> &HurwitzQuaternion {
        &self.omega
    }

    /// (x, y, z) of μ.
    pub fn xyz(&self) -> [BigInt; 3] {
        self.mu.int_vector().expect("μ is integral")
    }

    /// b + ω.
    pub fn b_plus_omega(&self, b: &BigInt) -> HurwitzQuaternion {
        &HurwitzQuaternion::from_int(b.clone()) + &self.omega
    }

    /// Discriminant of the maximal order: −4m, or −m when m ≡ 3 (mod 4).
    pub fn discriminant(&self) -> BigInt {
        if self.r == 2 {
            -&self.m
        } else {
            -(&self.m * 4u32)
        }
    }

    /// Unit ε with μ₂ = εμε̄, if any.
    pub fn equivalence_witness(&self, other: &Self) -> Result<Option<HurwitzQuaternion>> {
        if self.m != other.m {
            return Err(Error::NormMismatch(self.m.clone(), other.m.clone()));
        }
        for e in units() {
            let c = &(e * &self.mu) * &e.conjugate();
            if c == other.mu {
                return Ok(Some(e.clone()));
            }
        }
        Ok(None)
    }

    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        Ok(self.equivalence_witness(other)?.is_some())
    }

    /// All conjugates εμε̄ (with repetition, 24 entries).
    pub fn conjugates(&self) -> Vec<HurwitzQuaternion> {
        units().iter().map(|e| &(e * &self.mu) * &e.conjugate()).collect()
    }

    pub fn sign(&self) -> Result<Sign> {
        let (mut pos, mut neg) = (false, false);
        for c in self.conjugates() {
            let v = c.int_vector().expect("integral");
            pos |= v.iter().all(|x| !x.is_negative());
            neg |= v.iter().all(|x| !x.is_positive());
        }
        match (pos, neg) {
            (true, true) => Ok(Sign::Both),
            (true, false) => Ok(Sign::Positive),
            (false, true) => Ok(Sign::Negative),
            (false, false) => Err(Error::NoSign),
        }
    }
}

impl fmt::Display for QuadraticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O({})", self.mu.to_string().replace(' ', ""))
    }
}

/// 4^k(8n + 7) is the only obstruction.
pub fn is_sum_of_three_squares(m: u64) -> bool {
    if m == 0 {
        return true;
    }
    let mut n = m;
    while n.is_multiple_of(4) {
        n /= 4;
    }
    n % 8 != 7
}

fn isqrt_u64(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// All (x, y, z) with x ≥ y ≥ z ≥ 0 and x² + y² + z² = m, lexicographically descending.
pub fn all_three_squares_u64(m: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut x = isqrt_u64(m);
    loop {
        let rem = m - x * x;
        // y ≤ x and y² ≥ rem/2
        let mut y = isqrt_u64(rem).min(x);
        while 2 * y * y >= rem {
            let zz = rem - y * y;
            let z = isqrt_u64(zz);
            if z * z == zz && z <= y {
                out.push((x, y, z));
            }
            if y == 0 {
                break;
            }
            y -= 1;
        }
        if x == 0 || 3 * x * x < m {
            break;
        }
        x -= 1;
    }
    out
}

pub fn all_three_squares(m: &BigInt) -> Vec<(BigInt, BigInt, BigInt)> {
    let mm = m.to_u64().expect("all_three_squares is desk-scale only");
    all_three_squares_u64(mm).into_iter().map(|(x, y, z)| (x.into(), y.into(), z.into())).collect()
}

/// The lexicographically largest representation x ≥ y ≥ z ≥ 0.
pub fn three_squares(m: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if !m.is_positive() {
        return Err(Error::NoRepresentation(m.clone()));
    }
    if let Some(mm) = m.to_u64() {
        if !is_sum_of_three_squares(mm) {
            return Err(Error::NoRepresentation(m.clone()));
        }
        let x0 = isqrt_u64(mm);
        for x in (0..=x0).rev() {
            let rem = mm - x * x;
            for y in (0..=isqrt_u64(rem).min(x)).rev() {
                let zz = rem - y * y;
                let z = isqrt_u64(zz);
                if z * z == zz && z <= y {
                    return Ok((x.into(), y.into(), z.into()));
                }
                if 2 * y * y < rem {
                    break;
                }
            }
        }
        return Err(Error::NoRepresentation(m.clone()));
    }
    // Beyond u64: same descent with big integers.
    let mut x = isqrt(m);
    while !x.is_negative() {
        let rem = m - &x * &x;
        let mut y = isqrt(&rem).min(x.clone());
        while &y * &y * 2 >= rem {
            let zz = &rem - &y * &y;
            let z = isqrt(&zz);
            if &z * &z == zz && z <= y {
                return Ok((x, y, z));
            }
            y -= 1;
        }
        x -= 1;
    }
    Err(Error::NoRepresentation(m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        n.into()
    }

    #[test]
    fn three_squares_examples() {
        assert_eq!(three_squares(&b(21)).unwrap(), (b(4), b(2), b(1)));
        assert_eq!(three_squares(&b(893)).unwrap(), (b(29), b(6), b(4)));
        assert_eq!(three_squares(&b(7)), Err(Error::NoRepresentation(b(7))));
        assert_eq!(three_squares(&b(28)), Err(Error::NoRepresentation(b(28))));
        assert_eq!(all_three_squares_u64(9), vec![(3, 0, 0), (2, 2, 1)]);
        assert_eq!(all_three_squares_u64(3), vec![(1, 1, 1)]);
        assert!(all_three_squares_u64(1001).contains(&(26, 15, 10)));
    }

    #[test]
    fn three_squares_exhaustive_against_brute_force() {
        for m in 1..=2000u64 {
            let mut brute = Vec::new();
            for x in 0..=45u64 {
                for y in 0..=x {
                    for z in 0..=y {
                        if x * x + y * y + z * z == m {
                            brute.push((x, y, z));
                        }
                    }
                }
            }
            brute.sort();
            brute.reverse();
            assert_eq!(all_three_squares_u64(m), brute, "m = {m}");
            assert_eq!(is_sum_of_three_squares(m), !brute.is_empty());
        }
    }

    #[test]
    fn make_order_examples() {
        let o = QuadraticOrder::make(4, 2, 1).unwrap();
        assert_eq!((o.m().clone(), o.r()), (b(21), 1));
        assert_eq!(o.omega(), &HurwitzQuaternion::pure(4, 2, 1));
        let o = QuadraticOrder::make(1, 1, 1).unwrap();
        assert_eq!((o.m().clone(), o.r()), (b(3), 2));
        assert_eq!(o.omega(), &"(1+i+j+k)/2".parse().unwrap());
        assert!(matches!(QuadraticOrder::make(2, 2, 1), Err(Error::InvalidOrder(_))));
        assert!(matches!(QuadraticOrder::make(2, 1, 1).map(|o| o.r()), Ok(1)));
        assert!(matches!(QuadraticOrder::make(3, 3, 3), Err(Error::InvalidOrder(_))));
        assert_eq!(QuadraticOrder::make(29, 4, 6).unwrap().to_string(), "O(29i+4j+6k)");
    }

    #[test]
    fn omega_relations() {
        for (x, y, z) in [(1, 1, 1), (4, 2, 1), (29, 4, 6), (3, 1, 0)] {
            let o = QuadraticOrder::make(x, y, z).unwrap();
            let mu2 = o.mu() * o.mu();
            assert_eq!(mu2, HurwitzQuaternion::from_int(-o.m().clone()));
            let r = o.r() as i64;
            let back = &o.omega().scale(r) - &HurwitzQuaternion::from_int(r - 1);
            assert_eq!(&back, o.mu());
            assert_eq!(o.omega().norm() * r * r, b((r - 1) * (r - 1)) + o.m());
        }
    }

    #[test]
    fn equivalence_and_signs() {
        let o = QuadraticOrder::make(4, 2, 1).unwrap();
        assert!(o.equivalent(&o).unwrap());
        let neg = o.with_mu(&-o.mu()).unwrap();
        assert!(!o.equivalent(&neg).unwrap());
        let o = QuadraticOrder::make(3, 1, 0).unwrap();
        assert!(o.equivalent(&o.with_mu(&-o.mu()).unwrap()).unwrap());
        assert_eq!(o.sign().unwrap(), Sign::Both);
        assert_eq!(QuadraticOrder::make(1, 1, 1).unwrap().sign().unwrap(), Sign::Positive);
        assert_eq!(QuadraticOrder::make(29, 4, 6).unwrap().sign().unwrap(), Sign::Positive);
        assert_eq!(QuadraticOrder::make(-28, -10, -3).unwrap().sign().unwrap(), Sign::Negative);
        let distinct: std::collections::HashSet<_> = QuadraticOrder::make(4, 2, 1).unwrap().conjugates().into_iter().collect();
        assert_eq!(distinct.len(), 12);
        let other = QuadraticOrder::make(5, 2, 0).unwrap();
        assert!(matches!(o.equivalent(&other), Err(Error::NormMismatch(..))));
    }
}
