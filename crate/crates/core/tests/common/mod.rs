#![allow(dead_code)]

use num_bigint::BigInt;
use quatideal::{HurwitzQuaternion, Ideal, QuadraticOrder, ZBasis};
use rand::Rng;

pub fn order(x: i64, y: i64, z: i64) -> QuadraticOrder {
    QuadraticOrder::make(x, y, z).unwrap()
}

/// Every primitive ideal [a, b + ω] with a ≤ limit.
pub fn ideals_up_to(o: &QuadraticOrder, limit: i64) -> Vec<Ideal> {
    let mut out = Vec::new();
    for a in 1..=limit {
        for b in 0..a {
            let z = ZBasis::new(a, b);
            if z.is_valid(o) {
                out.push(Ideal::from_basis(o, &z).unwrap());
            }
        }
    }
    out
}

/// Trial division.
pub fn smallest_factor(m: u64) -> Option<u64> {
    (2..).take_while(|d| d * d <= m).find(|d| m.is_multiple_of(*d))
}

/// Smallest nonzero value of N(Xυ + Yυ₁) over |X|, |Y| ≤ bound.
pub fn lattice_scan_min(first: &HurwitzQuaternion, second: &HurwitzQuaternion, bound: i64) -> BigInt {
    let mut best: Option<BigInt> = None;
    for x in -bound..=bound {
        for y in -bound..=bound {
            if x == 0 && y == 0 {
                continue;
            }
            let v = &first.scale(BigInt::from(x)) + &second.scale(BigInt::from(y));
            let n = v.norm();
            if best.as_ref().is_none_or(|b| n < *b) {
                best = Some(n);
            }
        }
    }
    best.unwrap()
}

/// Uniform-ish Hurwitz quaternion with coordinates in [-r, r].
pub fn random_quaternion<R: Rng>(rng: &mut R, r: i64) -> HurwitzQuaternion {
    let half = rng.gen_bool(0.5);
    let pick = |rng: &mut R| {
        let v = rng.gen_range(-r..=r);
        if half {
            2 * v + 1
        } else {
            2 * v
        }
    };
    let d = [pick(rng), pick(rng), pick(rng), pick(rng)];
    HurwitzQuaternion::from_doubled(d[0].into(), d[1].into(), d[2].into(), d[3].into()).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R, r: i64) -> HurwitzQuaternion {
    HurwitzQuaternion::pure(rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}
