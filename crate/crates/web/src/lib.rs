//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string. The
//! `*_json` functions do the work and are what native tests call; the
//! `#[wasm_bindgen]` wrappers only turn errors into JavaScript exceptions.

use num_bigint::BigInt;
use quatideal::experiments::{self, CensusOptions};
use quatideal::{Ideal, QuadraticOrder, Sign, ZBasis};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Largest census limit the page may request; beyond this the tab stalls.
pub const MAX_CURVE_LIMIT: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleStep {
    pub mu: String,
    /// "P", "N", "B", or "?" when the order has no sign.
    pub sign: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleView {
    pub order: String,
    pub seed: String,
    pub steps: Vec<CycleStep>,
    pub separated: Option<bool>,
    pub class_order: u64,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionView {
    pub input: String,
    pub input_norm: String,
    pub reduced: String,
    pub reduced_basis: String,
    pub reduced_norm: String,
    pub right_order: String,
    pub ambiguous_class: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u64,
    pub sigma: u64,
    pub a: u64,
    pub percent: f64,
}

fn order(x: i64, y: i64, z: i64) -> Result<QuadraticOrder, String> {
    QuadraticOrder::make(x, y, z).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

fn sign_letter(s: Option<Sign>) -> String {
    match s {
        Some(Sign::Positive) => "P",
        Some(Sign::Negative) => "N",
        Some(Sign::Both) => "B",
        None => "?",
    }
    .to_string()
}

/// Cycle of orders reached from [a, b + ω] in O(xi + yj + zk), with signs and class order.
pub fn cycle_json(x: i64, y: i64, z: i64, a: i64, b: i64) -> Result<String, String> {
    let o = order(x, y, z)?;
    let seed = ZBasis::new(a, b);
    let c = experiments::walk_cycle(&o, &seed).map_err(|e| e.to_string())?;
    let class_order = experiments::class_order(&o, &seed, experiments::OrderSearch::Separation).map_err(|e| e.to_string())?;
    let steps = c.orders.iter().zip(&c.signs).map(|(mu, s)| CycleStep { mu: mu.to_string(), sign: sign_letter(*s) }).collect();
    Ok(to_json(&CycleView {
        order: o.to_string(),
        seed: c.seed.to_string(),
        steps,
        separated: experiments::is_separated(&c).ok(),
        class_order: class_order.order,
        method: format!("{:?}", class_order.method).to_lowercase(),
    }))
}

/// Reduces [a, b + ω] in O(xi + yj + zk).
pub fn reduce_json(x: i64, y: i64, z: i64, a: i64, b: i64) -> Result<String, String> {
    let o = order(x, y, z)?;
    let i = Ideal::from_basis(&o, &ZBasis::new(a, b)).map_err(|e| e.to_string())?;
    let r = i.reduce().map_err(|e| e.to_string())?;
    let basis = r.restore_z_basis().map_err(|e| e.to_string())?;
    let right = r.right_order().map_err(|e| e.to_string())?;
    Ok(to_json(&ReductionView {
        input: i.to_string(),
        input_norm: i.norm().to_string(),
        reduced: r.to_string(),
        reduced_basis: basis.to_string(),
        reduced_norm: r.norm().to_string(),
        right_order: right.to_string(),
        ambiguous_class: i.is_ambiguous_class().map_err(|e| e.to_string())?,
    }))
}

/// Share of Σ in A as N grows, sampled at `points` evenly spaced N ≤ limit.
pub fn census_curve_json(limit: u64, points: u64) -> Result<String, String> {
    if limit == 0 || limit > MAX_CURVE_LIMIT {
        return Err(format!("limit must lie in 1..={MAX_CURVE_LIMIT}"));
    }
    let points = points.clamp(1, limit);
    let census = experiments::census(limit, CensusOptions::default(), |_| {}).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let (mut sigma, mut a) = (0, 0);
    let mut entries = census.entries.iter().peekable();
    for p in 1..=points {
        let n = limit * p / points;
        while let Some(e) = entries.next_if(|e| e.m <= n) {
            sigma += 1;
            a += u64::from(e.in_a());
        }
        let percent = if sigma == 0 { 0.0 } else { 100.0 * a as f64 / sigma as f64 };
        out.push(CurvePoint { n, sigma, a, percent });
    }
    Ok(to_json(&out))
}

/// Class number of Δ = −4m, shown next to the census curve.
pub fn class_number_for(m: u64) -> Result<u64, String> {
    quatideal::forms::class_number(&(BigInt::from(m) * -4)).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn cycle(x: i32, y: i32, z: i32, a: i32, b: i32) -> Result<String, JsValue> {
    cycle_json(x.into(), y.into(), z.into(), a.into(), b.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn reduce(x: i32, y: i32, z: i32, a: i32, b: i32) -> Result<String, JsValue> {
    reduce_json(x.into(), y.into(), z.into(), a.into(), b.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn census_curve(limit: u32, points: u32) -> Result<String, JsValue> {
    census_curve_json(limit.into(), points.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn class_number(m: u32) -> Result<u32, JsValue> {
    class_number_for(m.into()).map(|h| h as u32).map_err(|e| JsValue::from_str(&e))
}
