//! Browser bindings: draw a covering, measure the distance from a clicked
//! point to a set, and compare two sets in the Hausdorff metric.
//!
//! The exported functions return strings. Errors come back as JS exceptions
//! carrying a message. Inputs are bounded so that a single call stays
//! interactive; wasm builds abort on panics, so nothing here may run into the
//! effort ceiling.

use std::cell::RefCell;
use std::collections::HashMap;

use certoset::fractal::cube_tb;
use certoset::render::{to_svg, Viewport};
use certoset::tbound::{hausdorff_tb, tb_dist};
use certoset::{ifs_limit_tb, sierpinski_tb, triangle_tb, Dyadic, Ifs, Point, TBSet};
use wasm_bindgen::prelude::*;

pub const SET_NAMES: [&str; 4] = ["triangle", "sierpinski", "sierpinski-limit", "square"];
pub const MAX_DRAW_LEVEL: u32 = 8;
pub const MAX_PRECISION: u32 = 14;

/// Grid that clicked coordinates are snapped to before they become dyadics.
const CLICK_BITS: i64 = 12;

/// Hausdorff distances between different handles of equal sets cost about
/// `4^prec` ball tests, so the demo stops lower than for point distances.
pub const MAX_HAUSDORFF_PRECISION: u32 = 5;

thread_local! {
    // one handle per name, so coverings are shared between calls and a set
    // compared with itself is recognized
    static SETS: RefCell<HashMap<&'static str, TBSet>> = RefCell::new(HashMap::new());
}

fn named_set(name: &str) -> Result<TBSet, String> {
    let key = SET_NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .ok_or_else(|| format!("unknown set `{name}`; choose one of {}", SET_NAMES.join(", ")))?;
    Ok(SETS.with(|sets| {
        sets.borrow_mut()
            .entry(key)
            .or_insert_with(|| match key {
                "triangle" => triangle_tb(),
                "sierpinski" => sierpinski_tb(),
                "sierpinski-limit" => ifs_limit_tb(&Ifs::sierpinski()),
                _ => cube_tb(2),
            })
            .clone()
    }))
}

fn check_precision(prec: u32, cap: u32) -> Result<(), String> {
    if prec > cap {
        return Err(format!("precision {prec} is above the demo limit {cap}"));
    }
    Ok(())
}

fn snap(v: f64) -> Result<Dyadic, String> {
    if !v.is_finite() || v.abs() > 1e6 {
        return Err(format!("coordinate {v} out of range"));
    }
    Ok(Dyadic::new((v * (1u64 << CLICK_BITS) as f64).round() as i64, -CLICK_BITS))
}

pub fn draw_svg(set: &str, level: u32) -> Result<String, String> {
    if level > MAX_DRAW_LEVEL {
        return Err(format!("level {level} is above the demo limit {MAX_DRAW_LEVEL}"));
    }
    let rec = named_set(set)?.export(level, level + 2);
    Ok(to_svg(&rec, &Viewport::default()))
}

/// The distance as a decimal, together with the snapped point it was measured from.
pub fn distance_to(set: &str, x: f64, y: f64, prec: u32) -> Result<String, String> {
    check_precision(prec, MAX_PRECISION)?;
    let (x, y) = (snap(x)?, snap(y)?);
    let p = Point::from_dyadics(vec![x.clone(), y.clone()]);
    let d = tb_dist(&named_set(set)?, &p).map_err(|e| e.to_string())?;
    Ok(format!("d(({}, {}), {set}) = {}", x.to_decimal_string(), y.to_decimal_string(), d.to_decimal(prec)))
}

pub fn hausdorff_named(a: &str, b: &str, prec: u32) -> Result<String, String> {
    check_precision(prec, MAX_HAUSDORFF_PRECISION)?;
    let h = hausdorff_tb(&named_set(a)?, &named_set(b)?).map_err(|e| e.to_string())?;
    Ok(h.to_decimal(prec))
}

#[wasm_bindgen]
pub fn set_names() -> String {
    SET_NAMES.join(",")
}

#[wasm_bindgen]
pub fn draw(set: &str, level: u32) -> Result<String, JsValue> {
    draw_svg(set, level).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn distance(set: &str, x: f64, y: f64, prec: u32) -> Result<String, JsValue> {
    distance_to(set, x, y, prec).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn hausdorff(a: &str, b: &str, prec: u32) -> Result<String, JsValue> {
    hausdorff_named(a, b, prec).map_err(|e| JsValue::from_str(&e))
}
