//! Census of ambiguous classes over ranges of m, and cycles of orders under a fixed ideal.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, squarefree_sieve};
use crate::error::{Error, Result};
use crate::factor::{ambiguous_leading, lattice_form};
use crate::forms::{class_group, class_number_bound, BinaryQuadraticForm};
use crate::hurwitz::HurwitzQuaternion;
use crate::ideals::{Ideal, ZBasis};
use crate::orders::{all_three_squares_u64, QuadraticOrder, Sign};
use crate::solutions::SolutionModule;

/// How often the census reports progress.
pub const PROGRESS_STEP: u64 = 10_000;

/// One representation m = x² + y² + z² examined by the census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepResult {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    /// Reduced norm form of the lattice ρμ = −μρ.
    pub form: BinaryQuadraticForm,
    /// Ambiguous and not principal.
    pub hit: bool,
    /// gcd(A, m) for the ambiguous ideal norm A, when it is a proper divisor.
    pub factor: Option<u64>,
}

/// Census outcome for a single m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub m: u64,
    pub reps: Vec<RepResult>,
}

impl CensusEntry {
    /// Number of representations that produce a non-principal ambiguous class.
    pub fn ambiguous_class_count(&self) -> usize {
        self.reps.iter().filter(|r| r.hit).count()
    }

    pub fn first_hit(&self) -> Option<&RepResult> {
        self.reps.iter().find(|r| r.hit)
    }

    pub fn factor_found(&self) -> Option<u64> {
        self.reps.iter().find_map(|r| r.factor)
    }

    pub fn in_a(&self) -> bool {
        self.first_hit().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub limit: u64,
    #[serde(rename = "sigma")]
    pub count_sigma: u64,
    #[serde(rename = "a")]
    pub count_a: u64,
    pub percent: f64,
    pub argmax_m: u64,
    pub argmax_count: u64,
    /// Smallest m in A at or above the window start, with its first hitting representation.
    pub example_in_a: Option<(u64, u64, u64, u64)>,
    /// Smallest m in Σ \ A at or above the window start.
    pub example_outside: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub row: CensusRow,
    pub entries: Vec<CensusEntry>,
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub threads: usize,
    /// Examples are taken from m ≥ this value.
    pub window_start: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { threads: 1, window_start: 1 }
    }
}

impl CensusOptions {
    /// Examples from the last decade (limit/10, limit], or from the start when limit ≤ 1000.
    pub fn for_limit(limit: u64) -> Self {
        let window_start = if limit > 1000 { limit / 10 + 1 } else { 1 };
        CensusOptions { threads: 1, window_start }
    }
}

/// Squarefree, composite, and not 7 mod 8.
pub fn in_sigma(m: u64) -> bool {
    m >= 2 && m % 8 != 7 && !is_prime_u64(m) && crate::arith::is_squarefree(&BigInt::from(m))
}

/// Representations used by the census: no zero coordinate and no repeated coordinate.
pub fn admissible_reps(m: u64) -> Vec<(u64, u64, u64)> {
    all_three_squares_u64(m).into_iter().filter(|&(x, y, z)| z != 0 && x != y && y != z).collect()
}

/// Examines μ = xi + yj + zk against −μ.
pub fn examine_rep(m: u64, x: u64, y: u64, z: u64) -> Result<RepResult> {
    let mu = HurwitzQuaternion::pure(x, y, z);
    let sm = SolutionModule::solve(&mu, &-&mu)?;
    let form = lattice_form(&sm)?;
    let hit = form.is_ambiguous() && !form.a.is_one();
    let factor = if hit {
        let (n, _) = ambiguous_leading(&form);
        let g = n.gcd(&BigInt::from(m));
        let g = crate::arith::to_u64(&g);
        (g > 1 && g < m).then_some(g)
    } else {
        None
    };
    Ok(RepResult { x, y, z, form, hit, factor })
}

pub fn census_entry(m: u64) -> Result<CensusEntry> {
    let reps = admissible_reps(m).into_iter().map(|(x, y, z)| examine_rep(m, x, y, z)).collect::<Result<Vec<_>>>()?;
    Ok(CensusEntry { m, reps })
}

/// Runs the census over m ≤ limit. `progress` is called with the number of m processed,
/// once per `PROGRESS_STEP` values.
pub fn census<F>(limit: u64, opts: CensusOptions, progress: F) -> Result<Census>
where
    F: Fn(u64) + Sync,
{
    let sieve = squarefree_sieve(limit);
    let done = AtomicU64::new(0);
    let work = |m: u64| -> Result<Option<CensusEntry>> {
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        if n.is_multiple_of(PROGRESS_STEP) {
            progress(n);
        }
        if m < 2 || !sieve[m as usize] || m % 8 == 7 || is_prime_u64(m) {
            return Ok(None);
        }
        census_entry(m).map(Some)
    };
    let results: Vec<Result<Option<CensusEntry>>> = if opts.threads <= 1 {
        (1..=limit).map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InternalInconsistency(e.to_string()))?;
        pool.install(|| (1..=limit).into_par_iter().map(work).collect())
    };
    let mut entries = Vec::new();
    for r in results {
        if let Some(e) = r? {
            entries.push(e);
        }
    }
    Ok(Census { row: summarize(limit, opts.window_start, &entries), entries })
}

fn summarize(limit: u64, window_start: u64, entries: &[CensusEntry]) -> CensusRow {
    let count_sigma = entries.len() as u64;
    let count_a = entries.iter().filter(|e| e.in_a()).count() as u64;
    let (mut argmax_m, mut argmax_count) = (0, 0);
    for e in entries {
        let c = e.ambiguous_class_count() as u64;
        if c > argmax_count {
            argmax_m = e.m;
            argmax_count = c;
        }
    }
    let window = entries.iter().filter(|e| e.m >= window_start);
    let example_in_a = window.clone().find_map(|e| e.first_hit().map(|r| (e.m, r.x, r.y, r.z)));
    let example_outside = window.clone().find(|e| !e.in_a()).map(|e| e.m);
    let percent = if count_sigma == 0 { 0.0 } else { 100.0 * count_a as f64 / count_sigma as f64 };
    CensusRow { limit, count_sigma, count_a, percent, argmax_m, argmax_count, example_in_a, example_outside }
}

/// Class-group data next to the census count, for a single m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupRow {
    pub m: u64,
    #[serde(with = "crate::serde_int")]
    pub discriminant: BigInt,
    pub class_number: u64,
    pub elementary_divisors: Vec<u64>,
    pub ambiguous_count: u64,
}

pub fn class_group_rows(ms: &[u64]) -> Result<Vec<ClassGroupRow>> {
    ms.iter()
        .map(|&m| {
            let disc = BigInt::from(m) * -4;
            let cg = class_group(&disc)?;
            let entry = census_entry(m)?;
            Ok(ClassGroupRow {
                m,
                discriminant: disc,
                class_number: cg.h,
                elementary_divisors: cg.elementary_divisors.clone(),
                ambiguous_count: entry.ambiguous_class_count() as u64,
            })
        })
        .collect()
}

/// The orders visited by repeatedly moving the integer basis [a, b + ω] to the right order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub order: QuadraticOrder,
    pub seed: ZBasis,
    /// μ₁ … μ_f.
    pub orders: Vec<HurwitzQuaternion>,
    /// ρᵢ with μᵢ₊₁ = ρᵢμᵢρᵢ⁻¹.
    pub generators: Vec<HurwitzQuaternion>,
    /// `None` where an order has no sign.
    pub signs: Vec<Option<Sign>>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

pub fn walk_cycle(order: &QuadraticOrder, seed: &ZBasis) -> Result<Cycle> {
    let a = &seed.a;
    if !a.is_positive() {
        return Err(Error::InvalidZBasis { a: a.clone(), b: seed.b.clone(), reason: "a must be positive".into() });
    }
    let b = seed.b.mod_floor(a);
    let bound = class_number_bound(&order.discriminant());
    let mut cur = order.clone();
    let mut orders = vec![order.mu().clone()];
    let mut generators = Vec::new();
    loop {
        let z = ZBasis::new(a.clone(), b.clone());
        if !z.is_valid(&cur) {
            return Err(Error::InvalidZBasis { a: a.clone(), b: b.clone(), reason: format!("not an ideal of {cur}") });
        }
        let rho = HurwitzQuaternion::from_int(a.clone()).gcd_right(&cur.b_plus_omega(&b))?;
        if rho.norm() != *a {
            return Err(Error::InternalInconsistency(format!("gcd_r({a}, {b} + ω) has norm {}", rho.norm())));
        }
        let next = cur.mu().conjugate_by(&rho)?.ok_or(Error::NotIntegral)?;
        let next = cur.with_mu(&next)?;
        generators.push(rho);
        if next.equivalent(order)? {
            break;
        }
        if orders.len() as u64 >= bound {
            return Err(Error::CycleOverrun(bound));
        }
        orders.push(next.mu().clone());
        cur = next;
    }
    let signs: Vec<Option<Sign>> = orders.iter().map(|mu| order.with_mu(mu).and_then(|o| o.sign()).ok()).collect();
    for (mu, _) in orders.iter().zip(&signs).filter(|(_, s)| s.is_none()) {
        log::warn!("order O({mu}) in the cycle of [{a}, {b} + ω] has no sign");
    }
    Ok(Cycle { order: order.clone(), seed: ZBasis::new(a.clone(), b), orders, generators, signs })
}

fn matches(s: Sign, want: Sign) -> bool {
    s == want || s == Sign::Both
}

/// Positive on the first ⌊f/2⌋ orders and negative on the rest, or the mirror image.
pub fn is_separated(c: &Cycle) -> Result<bool> {
    let signs = c.signs.iter().map(|s| s.ok_or(Error::NoSign)).collect::<Result<Vec<_>>>()?;
    let h = signs.len() / 2;
    let fits = |first: Sign, second: Sign| signs.iter().enumerate().all(|(i, &s)| matches(s, if i < h { first } else { second }));
    Ok(fits(Sign::Positive, Sign::Negative) || fits(Sign::Negative, Sign::Positive))
}

/// Smallest f ≥ 1 with the f-th power principal.
pub fn order_via_bruteforce(order: &QuadraticOrder, seed: &ZBasis) -> Result<u64> {
    let base = Ideal::from_z_basis(order, &seed.a, &seed.b)?.reduce()?;
    let bound = class_number_bound(&order.discriminant());
    let mut acc = base.clone();
    let mut f = 1;
    while !acc.is_unit() {
        if f >= bound {
            return Err(Error::CycleOverrun(bound));
        }
        acc = acc.multiply(&base)?.primitive_part().reduce()?;
        f += 1;
    }
    Ok(f)
}

/// [I] = [J].
pub fn same_class(i: &Ideal, j: &Ideal) -> Result<bool> {
    Ok(i.primitive_part().multiply(&j.primitive_part().conjugate()?)?.primitive_part().reduce()?.is_unit())
}

fn power_sign(base: &Ideal, k: u64) -> Result<Sign> {
    base.pow_reduced(k)?.right_order()?.sign()
}

/// Smallest k ≥ 1 with `pred(sign of base^k)`, found by doubling then bisection.
///
/// Assumes the predicate is false on [1, k₀) and true from k₀ on, up to the class order.
/// A predicate that never holds means the powers stay on one side, so the seed is not separated.
fn border(base: &Ideal, bound: u64, pred: impl Fn(Sign) -> bool) -> Result<u64> {
    let mut lo = 0;
    let mut hi = 1;
    while !pred(power_sign(base, hi)?) {
        if hi > bound {
            return Err(Error::NotSeparated);
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(power_sign(base, mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Class order from the two sign borders of a separated cycle, without walking it.
///
/// Powers of the ideal run forward through the cycle; powers of its conjugate run backward.
pub fn order_via_separation(order: &QuadraticOrder, seed: &ZBasis) -> Result<u64> {
    let ideal = Ideal::from_z_basis(order, &seed.a, &seed.b)?.reduce()?;
    if ideal.is_unit() {
        return Ok(1);
    }
    let bound = class_number_bound(&order.discriminant());
    let first = match order.sign()? {
        Sign::Both => return Err(Error::NotSeparated),
        s => s,
    };
    let second = if first == Sign::Positive { Sign::Negative } else { Sign::Positive };
    // forward: first k whose order lies on the second side
    let d = border(&ideal, bound, |s| s == second)?;
    // backward: the step before μ₁ must already be on the second side
    let back = ideal.conjugate()?;
    if power_sign(&back, 1)? != second {
        return Err(Error::NotSeparated);
    }
    let e = border(&back, bound, |s| s == first)?;
    let f = d + e - 1;
    if d != f / 2 || !ideal.pow_reduced(f)?.is_unit() {
        return Err(Error::NotSeparated);
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSearch {
    Separation,
    Bruteforce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOrder {
    pub order: u64,
    pub method: OrderSearch,
    /// The separation search was asked for but the sign pattern did not allow it.
    pub fell_back: bool,
}

/// Class order by the requested search; separation falls back to brute force when the seed is not separated.
pub fn class_order(order: &QuadraticOrder, seed: &ZBasis, search: OrderSearch) -> Result<ClassOrder> {
    if search == OrderSearch::Separation {
        match order_via_separation(order, seed) {
            Ok(f) => return Ok(ClassOrder { order: f, method: search, fell_back: false }),
            Err(Error::NotSeparated | Error::NoSign) => {
                log::info!("seed [{}, {}] is not separated in {order}; counting powers instead", seed.a, seed.b);
                let f = order_via_bruteforce(order, seed)?;
                return Ok(ClassOrder { order: f, method: OrderSearch::Bruteforce, fell_back: true });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ClassOrder { order: order_via_bruteforce(order, seed)?, method: search, fell_back: false })
}

/// Brute-force class order of a form, for cross-checks.
pub fn form_order(f: &BinaryQuadraticForm) -> Result<u64> {
    f.order()
}

/// Whether the ideal generated by `rho` is principal.
pub fn is_principal_generator(order: &QuadraticOrder, rho: &HurwitzQuaternion) -> Result<bool> {
    Ok(Ideal::from_generator(order, rho)?.reduce()?.norm().is_one())
}
