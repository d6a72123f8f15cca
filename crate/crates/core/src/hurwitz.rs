//! Exact arithmetic on Hurwitz (integral) quaternions.
//!
//! A quaternion `(a + bi + cj + dk)/2` is stored through its doubled
//! coordinates `(a, b, c, d)`, which must all have the same parity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawQuaternion", into = "RawQuaternion")]
pub struct HurwitzQuaternion {
    da: BigInt,
    db: BigInt,
    dc: BigInt,
    dd: BigInt,
}

/// Serialized shape; integers small enough go out as JSON numbers, others as strings.
#[derive(Serialize, Deserialize)]
struct RawQuaternion {
    #[serde(with = "crate::serde_int")]
    da: BigInt,
    #[serde(with = "crate::serde_int")]
    db: BigInt,
    #[serde(with = "crate::serde_int")]
    dc: BigInt,
    #[serde(with = "crate::serde_int")]
    dd: BigInt,
}

impl TryFrom<RawQuaternion> for HurwitzQuaternion {
    type Error = Error;
    fn try_from(r: RawQuaternion) -> Result<Self> {
        HurwitzQuaternion::from_doubled(r.da, r.db, r.dc, r.dd)
    }
}

impl From<HurwitzQuaternion> for RawQuaternion {
    fn from(q: HurwitzQuaternion) -> Self {
        RawQuaternion { da: q.da, db: q.db, dc: q.dc, dd: q.dd }
    }
}

impl HurwitzQuaternion {
    /// From doubled coordinates; fails unless all four share a parity.
    pub fn from_doubled(da: BigInt, db: BigInt, dc: BigInt, dd: BigInt) -> Result<Self> {
        let p = da.is_odd();
        if db.is_odd() != p || dc.is_odd() != p || dd.is_odd() != p {
            return Err(Error::Parse {
                input: format!("({da}, {db}, {dc}, {dd})/2"),
                reason: "doubled coordinates must share a parity".into(),
            });
        }
        Ok(HurwitzQuaternion { da, db, dc, dd })
    }

    fn raw(da: BigInt, db: BigInt, dc: BigInt, dd: BigInt) -> Self {
        debug_assert!(da.is_odd() == db.is_odd() && db.is_odd() == dc.is_odd() && dc.is_odd() == dd.is_odd());
        HurwitzQuaternion { da, db, dc, dd }
    }

    /// t + xi + yj + zk with integer coordinates.
    pub fn new<T: Into<BigInt>>(t: T, x: T, y: T, z: T) -> Self {
        let two = BigInt::from(2);
        Self::raw(&two * t.into(), &two * x.into(), &two * y.into(), two * z.into())
    }

    pub fn pure<T: Into<BigInt>>(x: T, y: T, z: T) -> Self {
        Self::new(BigInt::zero(), x.into(), y.into(), z.into())
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Self::new(n.into(), BigInt::zero(), BigInt::zero(), BigInt::zero())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn doubled(&self) -> [&BigInt; 4] {
        [&self.da, &self.db, &self.dc, &self.dd]
    }

    pub fn is_zero(&self) -> bool {
        self.da.is_zero() && self.db.is_zero() && self.dc.is_zero() && self.dd.is_zero()
    }

    /// True when the coordinates are half-odd integers.
    pub fn is_half(&self) -> bool {
        self.da.is_odd()
    }

    /// Integer coordinates (t, x, y, z), if there are no halves.
    pub fn coords(&self) -> Option<[BigInt; 4]> {
        if self.is_half() {
            return None;
        }
        Some([&self.da / 2, &self.db / 2, &self.dc / 2, &self.dd / 2])
    }

    /// Integer vector part (x, y, z) of an integral quaternion.
    pub fn int_vector(&self) -> Option<[BigInt; 3]> {
        let [_, x, y, z] = self.coords()?;
        Some([x, y, z])
    }

    pub fn conjugate(&self) -> Self {
        Self::raw(self.da.clone(), -&self.db, -&self.dc, -&self.dd)
    }

    pub fn norm(&self) -> BigInt {
        let s = &self.da * &self.da + &self.db * &self.db + &self.dc * &self.dc + &self.dd * &self.dd;
        debug_assert!((&s % 4u32).is_zero());
        s >> 2
    }

    pub fn real_part(&self) -> BigRational {
        BigRational::new(self.da.clone(), BigInt::from(2))
    }

    /// Twice the real part, always an integer.
    pub fn trace(&self) -> BigInt {
        self.da.clone()
    }

    pub fn vector_part(&self) -> RationalQuaternion {
        RationalQuaternion::from_doubled([&BigInt::zero(), &self.db, &self.dc, &self.dd])
    }

    pub fn is_pure(&self) -> bool {
        self.da.is_zero()
    }

    pub fn to_rational(&self) -> RationalQuaternion {
        RationalQuaternion::from_doubled(self.doubled())
    }

    pub fn inverse(&self) -> Result<RationalQuaternion> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        let mut out = c.to_rational();
        for v in out.coords.iter_mut() {
            *v = &*v / BigRational::from_integer(n.clone());
        }
        Ok(out)
    }

    pub fn scale<T: Into<BigInt>>(&self, k: T) -> Self {
        let k = k.into();
        Self::raw(&self.da * &k, &self.db * &k, &self.dc * &k, &self.dd * &k)
    }

    /// Exact division by an integer, if the quotient is still Hurwitz.
    pub fn div_int(&self, k: &BigInt) -> Option<Self> {
        if k.is_zero() {
            return None;
        }
        let d = self.doubled();
        if d.iter().any(|v| !(*v % k).is_zero()) {
            return None;
        }
        Self::from_doubled(&self.da / k, &self.db / k, &self.dc / k, &self.dd / k).ok()
    }

    /// Largest n ≥ 1 with q/n still integral.
    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::ZeroQuaternion);
        }
        let g = self.da.gcd(&self.db).gcd(&self.dc).gcd(&self.dd);
        let all_odd = self.doubled().iter().all(|v| (*v / &g).is_odd());
        Ok(if all_odd { g } else { g / 2 })
    }

    pub fn is_primitive(&self) -> Result<bool> {
        Ok(self.content()?.is_one())
    }

    /// Σ x₀x₁ over the vector parts.
    pub fn scalar_product(&self, r: &Self) -> BigRational {
        let s = &self.db * &r.db + &self.dc * &r.dc + &self.dd * &r.dd;
        BigRational::new(s, BigInt::from(4))
    }

    /// Scalar product of the vector parts times four; always an integer.
    pub fn scalar_product4(&self, r: &Self) -> BigInt {
        &self.db * &r.db + &self.dc * &r.dc + &self.dd * &r.dd
    }

    /// Re(q)Re(r) + (q, r).
    pub fn full_scalar_product(&self, r: &Self) -> BigRational {
        BigRational::new(&self.da * &r.da + self.scalar_product4(r), BigInt::from(4))
    }

    /// Cross product of the vector parts.
    pub fn vector_product(&self, r: &Self) -> RationalQuaternion {
        let (x0, y0, z0) = (&self.db, &self.dc, &self.dd);
        let (x1, y1, z1) = (&r.db, &r.dc, &r.dd);
        let cross = [BigInt::zero(), y0 * z1 - z0 * y1, z0 * x1 - x0 * z1, x0 * y1 - y0 * x1];
        let four = BigInt::from(4);
        RationalQuaternion { coords: cross.map(|v| BigRational::new(v, four.clone())) }
    }

    /// q = ξ·d + s with N(s) < N(d), using Hurwitz rounding.
    pub fn div_rem_right(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = d.norm();
        // q·d⁻¹ has doubled coordinates p/n where p = doubled(q·d̄).
        let p = self * &d.conjugate();
        let two_n = &n * 2;
        let nearest: Vec<BigInt> = p.doubled().iter().map(|v| (*v + &n).div_floor(&two_n) * 2).collect();
        let halves: Vec<BigInt> = p.doubled().iter().map(|v| v.div_floor(&two_n) * 2 + 1).collect();
        let mut best: Option<(BigInt, Self, Self)> = None;
        for c in [nearest, halves] {
            let xi = Self::raw(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone());
            let s = self - &(&xi * d);
            let ns = s.norm();
            let better = match &best {
                None => true,
                Some((bn, bxi, _)) => match ns.cmp(bn) {
                    Ordering::Less => true,
                    Ordering::Equal => xi.lex_cmp(bxi) == Ordering::Less,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((ns, xi, s));
            }
        }
        let (ns, xi, s) = best.expect("two candidates");
        if ns >= n {
            return Err(Error::InternalInconsistency("Hurwitz rounding left a large remainder".into()));
        }
        Ok((xi, s))
    }

    /// Greatest common right divisor, canonical up to left units.
    pub fn gcd_right(&self, r: &Self) -> Result<Self> {
        if self.is_zero() && r.is_zero() {
            return Err(Error::ZeroQuaternion);
        }
        let (mut q, mut r) = (self.clone(), r.clone());
        while !r.is_zero() {
            let (_, s) = q.div_rem_right(&r)?;
            q = std::mem::replace(&mut r, s);
        }
        Ok(q.canonical_left())
    }

    /// Greatest common left divisor, canonical up to right units.
    pub fn gcd_left(&self, r: &Self) -> Result<Self> {
        let g = self.conjugate().gcd_right(&r.conjugate())?;
        Ok(g.conjugate().canonical_right())
    }

    /// Right gcd of a list; zeros are ignored.
    pub fn gcd_right_all<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Result<Self> {
        let mut acc = Self::zero();
        for it in items {
            if !it.is_zero() {
                acc = if acc.is_zero() { it.clone() } else { acc.gcd_right(it)? };
            }
        }
        if acc.is_zero() {
            return Err(Error::ZeroQuaternion);
        }
        Ok(acc.canonical_left())
    }

    /// Canonical member of the left-unit orbit {ε·q}; see also [`Self::canonical_right`].
    pub fn canonical_associate(&self) -> Self {
        self.canonical_left()
    }

    /// Lexicographically largest doubled tuple among ε·q.
    pub fn canonical_left(&self) -> Self {
        units().iter().map(|e| e * self).max_by(|a, b| a.lex_cmp(b)).expect("24 units")
    }

    /// Lexicographically largest doubled tuple among q·ε.
    pub fn canonical_right(&self) -> Self {
        units().iter().map(|e| self * e).max_by(|a, b| a.lex_cmp(b)).expect("24 units")
    }

    fn lex_cmp(&self, o: &Self) -> Ordering {
        self.doubled().cmp(&o.doubled())
    }

    /// q·d⁻¹, if it is Hurwitz.
    pub fn right_quotient(&self, d: &Self) -> Result<Option<Self>> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok((self * &d.conjugate()).div_int(&d.norm()))
    }

    /// d⁻¹·q, if it is Hurwitz.
    pub fn left_quotient(&self, d: &Self) -> Result<Option<Self>> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok((&d.conjugate() * self).div_int(&d.norm()))
    }

    /// d divides q from the right: q = ξ·d.
    pub fn divides_right(d: &Self, q: &Self) -> Result<bool> {
        Ok(q.right_quotient(d)?.is_some())
    }

    /// d divides q from the left: q = d·ξ.
    pub fn divides_left(d: &Self, q: &Self) -> Result<bool> {
        Ok(q.left_quotient(d)?.is_some())
    }

    /// ρ·q·ρ⁻¹ when integral.
    pub fn conjugate_by(&self, rho: &Self) -> Result<Option<Self>> {
        if rho.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok((&(rho * self) * &rho.conjugate()).div_int(&rho.norm()))
    }
}

/// The 24 units: ±1, ±i, ±j, ±k, then (±1±i±j±k)/2.
pub fn units() -> &'static [HurwitzQuaternion] {
    static UNITS: OnceLock<Vec<HurwitzQuaternion>> = OnceLock::new();
    UNITS.get_or_init(|| {
        let mut v = Vec::with_capacity(24);
        for axis in 0..4 {
            for s in [2i64, -2] {
                let mut d = [0i64; 4];
                d[axis] = s;
                v.push(HurwitzQuaternion::raw(d[0].into(), d[1].into(), d[2].into(), d[3].into()));
            }
        }
        for a in [1i64, -1] {
            for b in [1i64, -1] {
                for c in [1i64, -1] {
                    for d in [1i64, -1] {
                        v.push(HurwitzQuaternion::raw(a.into(), b.into(), c.into(), d.into()));
                    }
                }
            }
        }
        v
    })
}

impl Add for &HurwitzQuaternion {
    type Output = HurwitzQuaternion;
    fn add(self, r: Self) -> HurwitzQuaternion {
        // Mixed parities (integral + half) would need re-checking.
        HurwitzQuaternion::from_doubled(&self.da + &r.da, &self.db + &r.db, &self.dc + &r.dc, &self.dd + &r.dd)
            .expect("sum of Hurwitz quaternions")
    }
}

impl Sub for &HurwitzQuaternion {
    type Output = HurwitzQuaternion;
    fn sub(self, r: Self) -> HurwitzQuaternion {
        self + &(-r)
    }
}

impl Neg for &HurwitzQuaternion {
    type Output = HurwitzQuaternion;
    fn neg(self) -> HurwitzQuaternion {
        HurwitzQuaternion::raw(-&self.da, -&self.db, -&self.dc, -&self.dd)
    }
}

impl Mul for &HurwitzQuaternion {
    type Output = HurwitzQuaternion;
    fn mul(self, q: Self) -> HurwitzQuaternion {
        let (a1, b1, c1, d1) = (&self.da, &self.db, &self.dc, &self.dd);
        let (a2, b2, c2, d2) = (&q.da, &q.db, &q.dc, &q.dd);
        let t = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2;
        let x = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2;
        let y = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2;
        let z = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2;
        HurwitzQuaternion::raw(t >> 1, x >> 1, y >> 1, z >> 1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for HurwitzQuaternion {
            type Output = HurwitzQuaternion;
            fn $f(self, r: Self) -> HurwitzQuaternion {
                (&self).$f(&r)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for HurwitzQuaternion {
    type Output = HurwitzQuaternion;
    fn neg(self) -> HurwitzQuaternion {
        -&self
    }
}

/// Quaternion with rational coordinates (t, x, y, z).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalQuaternion {
    pub coords: [BigRational; 4],
}

impl RationalQuaternion {
    fn from_doubled(d: [&BigInt; 4]) -> Self {
        let two = BigInt::from(2);
        RationalQuaternion { coords: d.map(|v| BigRational::new(v.clone(), two.clone())) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [t1, x1, y1, z1] = &self.coords;
        let [t2, x2, y2, z2] = &o.coords;
        RationalQuaternion {
            coords: [
                t1 * t2 - x1 * x2 - y1 * y2 - z1 * z2,
                t1 * x2 + x1 * t2 + y1 * z2 - z1 * y2,
                t1 * y2 - x1 * z2 + y1 * t2 + z1 * x2,
                t1 * z2 + x1 * y2 - y1 * x2 + z1 * t2,
            ],
        }
    }

    /// Back to a Hurwitz quaternion, if the coordinates allow it.
    pub fn to_hurwitz(&self) -> Option<HurwitzQuaternion> {
        let two = BigRational::from_integer(BigInt::from(2));
        let mut d = Vec::with_capacity(4);
        for c in &self.coords {
            let v = c * &two;
            if !v.is_integer() {
                return None;
            }
            d.push(v.to_integer());
        }
        let [a, b, c, e]: [BigInt; 4] = d.try_into().ok()?;
        HurwitzQuaternion::from_doubled(a, b, c, e).ok()
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, c: [&BigInt; 4], denom: &str) -> fmt::Result {
    let names = ["", "i", "j", "k"];
    let mut first = true;
    for (v, name) in c.iter().zip(names) {
        if v.is_zero() {
            continue;
        }
        let neg = v.is_negative();
        let mag = v.abs();
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        if mag.is_one() && !name.is_empty() && denom.is_empty() {
            write!(f, "{name}")?;
        } else {
            write!(f, "{mag}{denom}{name}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for HurwitzQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords() {
            Some(c) => fmt_terms(f, [&c[0], &c[1], &c[2], &c[3]], ""),
            None => fmt_terms(f, self.doubled(), "/2"),
        }
    }
}

/// Parses sums such as `1+2i-j`, `(1+i+j+k)/2`, `1/2 - 3/2i + 1/2j + 1/2k`.
impl FromStr for HurwitzQuaternion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, halved) = match compact.strip_prefix('(').and_then(|r| r.strip_suffix(")/2")) {
            Some(inner) => (inner.to_string(), true),
            None => (compact.clone(), false),
        };
        if body.is_empty() {
            return Err(bad("empty input"));
        }
        // Accumulate doubled coordinates.
        let mut acc = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        let mut rest = body.as_str();
        while !rest.is_empty() {
            let (neg, after) = match rest.as_bytes()[0] {
                b'+' => (false, &rest[1..]),
                b'-' => (true, &rest[1..]),
                _ if rest.len() == body.len() => (false, rest),
                _ => return Err(bad("expected + or -")),
            };
            let end = after[1.min(after.len())..].find(['+', '-']).map(|p| p + 1).unwrap_or(after.len());
            let term = &after[..end];
            rest = &after[end..];
            let (num_part, axis) = match term.chars().last() {
                Some('i') => (&term[..term.len() - 1], 1),
                Some('j') => (&term[..term.len() - 1], 2),
                Some('k') => (&term[..term.len() - 1], 3),
                Some(_) => (term, 0),
                None => return Err(bad("empty term")),
            };
            let num_part = num_part.strip_suffix('*').unwrap_or(num_part);
            let (digits, half) = match num_part.strip_suffix("/2") {
                Some(d) => (d, true),
                None => (num_part, false),
            };
            let mut v = if digits.is_empty() {
                if axis == 0 {
                    return Err(bad("empty term"));
                }
                BigInt::one()
            } else {
                digits.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?
            };
            if !half {
                v *= 2;
            }
            if neg {
                v = -v;
            }
            acc[axis] += v;
        }
        let [a, b, c, d] = acc;
        if halved {
            let two = BigInt::from(2);
            if [&a, &b, &c, &d].iter().any(|v| !(*v % &two).is_zero()) {
                return Err(bad("coefficients inside (…)/2 must be integers"));
            }
            HurwitzQuaternion::from_doubled(a / 2, b / 2, c / 2, d / 2).map_err(|_| bad("not a Hurwitz quaternion"))
        } else {
            HurwitzQuaternion::from_doubled(a, b, c, d).map_err(|_| bad("not a Hurwitz quaternion"))
        }
    }
}
