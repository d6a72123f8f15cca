//! Factoring through representations: two squares, and pairs of quadratic orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::BinaryQuadraticForm;
use crate::hurwitz::HurwitzQuaternion;
use crate::ideals::Ideal;
use crate::orders::QuadraticOrder;
use crate::solutions::SolutionModule;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trace {
    TwoSquares {
        #[serde(with = "crate::serde_int")]
        x0: BigInt,
        #[serde(with = "crate::serde_int")]
        y0: BigInt,
        #[serde(with = "crate::serde_int")]
        x1: BigInt,
        #[serde(with = "crate::serde_int")]
        y1: BigInt,
        doubled: bool,
    },
    Orders {
        mu: HurwitzQuaternion,
        mu_prime: HurwitzQuaternion,
        /// Shortest solution of ρμ = μ'ρ.
        rho: HurwitzQuaternion,
        #[serde(with = "crate::serde_int")]
        rho_norm: BigInt,
        reduced_form: BinaryQuadraticForm,
        /// Pseudo generator of the ambiguous ideal in the class.
        ambiguous_rho: HurwitzQuaternion,
        #[serde(with = "crate::serde_int")]
        ambiguous_norm: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorWitness {
    #[serde(with = "crate::serde_int")]
    pub m: BigInt,
    #[serde(with = "crate::serde_int")]
    pub factor: BigInt,
    pub trace: Trace,
}

impl FactorWitness {
    fn new(m: BigInt, factor: BigInt, trace: Trace) -> Result<Self> {
        if !(factor > BigInt::one() && factor < m && (&m % &factor).is_zero()) {
            return Err(Error::InternalInconsistency(format!("{factor} is not a proper divisor of {m}")));
        }
        Ok(FactorWitness { m, factor, trace })
    }
}

/// gcd(x₀y₁ − y₀x₁, m) from m = x₀² + ky₀² = x₁² + ky₁², k = 1 or 2.
pub fn fermat_two_squares(m: &BigInt, x0: &BigInt, y0: &BigInt, x1: &BigInt, y1: &BigInt, doubled: bool) -> Result<FactorWitness> {
    let k = if doubled { 2 } else { 1 };
    let ok = |x: &BigInt, y: &BigInt| x * x + y * y * k == *m && !y.is_negative() && (doubled || x >= y);
    if !ok(x0, y0) || !ok(x1, y1) || x0 <= x1 {
        return Err(Error::NotTwoRepresentations);
    }
    let g = (x0 * y1 - y0 * x1).gcd(m);
    let trace = Trace::TwoSquares { x0: x0.clone(), y0: y0.clone(), x1: x1.clone(), y1: y1.clone(), doubled };
    FactorWitness::new(m.clone(), g, trace)
}

/// All (x, y) with x² + ky² = m, x descending.
pub fn two_square_reps(m: u64, doubled: bool) -> Vec<(u64, u64)> {
    let k = if doubled { 2 } else { 1 };
    let mut out = Vec::new();
    let mut x = (m as f64).sqrt() as u64 + 1;
    loop {
        if x * x <= m {
            let rest = m - x * x;
            if rest.is_multiple_of(k) {
                let yy = rest / k;
                let y = (yy as f64).sqrt() as u64;
                let y = (y.saturating_sub(1)..=y + 1).find(|t| t * t == yy);
                if let Some(y) = y {
                    if doubled || y <= x {
                        out.push((x, y));
                    }
                }
            }
        }
        if x == 0 {
            break;
        }
        x -= 1;
    }
    out
}

/// (A, B) of a form (A, B, ·) equivalent to a reduced ambiguous form with B ∈ {0, A}.
///
/// A is the norm of an ambiguous ideal in the class, so gcd(A, m) is a candidate factor.
pub fn ambiguous_leading(f: &BinaryQuadraticForm) -> (BigInt, BigInt) {
    if f.a == f.c && !f.b.is_zero() {
        // (a, b, a) ~ (2a − b, 2a − b, a)
        let n = &f.a * 2u32 - &f.b;
        (n.clone(), n)
    } else {
        (f.a.clone(), f.b.clone())
    }
}

/// Pseudo generator of the ambiguous ideal in the class of a reduced ambiguous form.
///
/// `r` is 1 when the form lives in Z[μ] (discriminant −4m), 2 for the maximal order when m ≡ 3 (mod 4).
fn ambiguous_generator(mu: &HurwitzQuaternion, r: u32, f: &BinaryQuadraticForm) -> Option<(HurwitzQuaternion, BigInt)> {
    let (a, b) = ambiguous_leading(f);
    let bz = ((-&b - r + 1u32) / 2u32).mod_floor(&a);
    let omega = if r == 2 {
        let [_, x, y, z] = mu.doubled().map(|v| v / 2);
        HurwitzQuaternion::from_doubled(1.into(), x, y, z).ok()?
    } else {
        mu.clone()
    };
    let w = &HurwitzQuaternion::from_int(bz) + &omega;
    let rho = HurwitzQuaternion::from_int(a.clone()).gcd_right(&w).ok()?;
    (rho.norm() == a).then_some((rho, a))
}

/// Reduced primitive part of the norm form on a solution lattice.
pub fn lattice_form(sm: &SolutionModule) -> Result<BinaryQuadraticForm> {
    let (a, b, c) = sm.norm_form();
    let g = a.gcd(&b).gcd(&c);
    BinaryQuadraticForm { a: a / &g, b: b / &g, c: c / &g }.reduce()
}

/// Factor of m from the solution lattice of ρμ = μ₂ρ, when its class is ambiguous and non-principal.
pub fn factor_from_order_pair(o: &QuadraticOrder, o2: &QuadraticOrder) -> Result<Option<FactorWitness>> {
    let sm = SolutionModule::solve(o.mu(), o2.mu())?;
    let m = o.m().clone();
    let rho = sm.minimal_vector();
    let form = lattice_form(&sm)?;
    if !form.is_ambiguous() || form.a.is_one() {
        return Ok(None);
    }
    // Discriminant −m means the lattice is an ideal of the maximal order; −4m means Z[μ].
    let r = if form.discriminant() == -&m { 2 } else { 1 };
    let Some((amb, n)) = ambiguous_generator(o.mu(), r, &form) else {
        return Err(Error::InternalInconsistency(format!("no ambiguous ideal for form {form}")));
    };
    let two_mu = o.mu().scale(2 / r);
    if !HurwitzQuaternion::divides_right(&amb, &two_mu)? {
        return Err(Error::InternalInconsistency("ambiguous generator does not divide (2/r)μ".into()));
    }
    let g = n.gcd(&m);
    if g.is_one() || g == m {
        return Ok(None);
    }
    let trace = Trace::Orders {
        mu: o.mu().clone(),
        mu_prime: o2.mu().clone(),
        rho_norm: rho.norm(),
        rho,
        reduced_form: form,
        ambiguous_rho: amb,
        ambiguous_norm: n,
    };
    FactorWitness::new(m, g, trace).map(Some)
}

/// Driver: try μ against −μ for every representation of m, then all pairs.
pub fn factor_by_representations(m: &BigInt, pairs: bool) -> Result<Option<FactorWitness>> {
    let reps = crate::orders::all_three_squares(m);
    let orders: Vec<QuadraticOrder> = reps.iter().filter_map(|(x, y, z)| QuadraticOrder::make(x.clone(), y.clone(), z.clone()).ok()).collect();
    if orders.is_empty() {
        return Err(Error::InvalidOrder(format!("no admissible order of norm {m}")));
    }
    for o in &orders {
        let neg = o.with_mu(&-o.mu())?;
        if let Some(w) = factor_from_order_pair(o, &neg)? {
            return Ok(Some(w));
        }
    }
    if pairs {
        for o in &orders {
            for o2 in &orders {
                for c in o2.conjugates() {
                    let o2c = o2.with_mu(&c)?;
                    if let Some(w) = factor_from_order_pair(o, &o2c)? {
                        return Ok(Some(w));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    /// Exactly one coefficient is zero.
    OneZero,
    /// Exactly two coefficients agree in absolute value.
    EqualPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub hypothesis: Shape,
    pub mu_prime: HurwitzQuaternion,
    pub class_ambiguous: bool,
    pub shape_holds: bool,
}

impl ShapeReport {
    pub fn biconditional_holds(&self) -> bool {
        self.class_ambiguous == self.shape_holds
    }
}

fn has_shape(mu: &HurwitzQuaternion, s: Shape) -> bool {
    let v = mu.int_vector().expect("integral");
    match s {
        Shape::OneZero => v.iter().filter(|x| x.is_zero()).count() == 1,
        Shape::EqualPair => {
            let a: Vec<BigInt> = v.iter().map(|x| x.abs()).collect();
            let eq = [(0, 1), (0, 2), (1, 2)].iter().filter(|(i, j)| a[*i] == a[*j]).count();
            eq == 1
        }
    }
}

/// Checks: [I] ambiguous ⇔ ρμρ⁻¹ has the same special shape as μ.
pub fn verify_shape_theorem(ideal: &Ideal) -> Result<ShapeReport> {
    let mu = ideal.order().mu();
    let hypothesis = if has_shape(mu, Shape::OneZero) {
        Shape::OneZero
    } else if has_shape(mu, Shape::EqualPair) {
        Shape::EqualPair
    } else {
        return Err(Error::ShapeMismatch);
    };
    let mu_prime = ideal.right_order()?.mu().clone();
    let shape_holds = has_shape(&mu_prime, hypothesis);
    Ok(ShapeReport { hypothesis, class_ambiguous: ideal.is_ambiguous_class()?, shape_holds, mu_prime })
}
