//! wasm-bindgen entry points for the browser demo.
//!
//! Every function takes plain strings and returns a JSON document as a string.
//! Errors come back as a thrown JS string.

use blockalg::halfder::classify as classify_degrees;
use blockalg::homlie::{hom_jacobi_check, MapExpr};
use blockalg::scalar::ParamField;
use blockalg::specdsl::{builtin_algebra, parse_spec};
use blockalg::{Algebra, AlgebraSpec, Parity, QMode, RatFunc, Rational, Window};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest window the page accepts; keeps a single call under a few seconds.
const MAX_SIDE: i64 = 6;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `B`, `S`, or the text of an `.alg` file.
fn spec(source: &str) -> Result<AlgebraSpec, String> {
    match source.trim() {
        "B" | "S" => builtin_algebra(source.trim()).map_err(err),
        text => parse_spec(text).map_err(err),
    }
}

fn window(s: &str) -> Result<Window, String> {
    let w: Window = s.trim().parse().map_err(err)?;
    if w.m_max > MAX_SIDE || w.i_max > MAX_SIDE {
        return Err(format!("window {w} is larger than the demo limit {MAX_SIDE}x{MAX_SIDE}"));
    }
    Ok(w)
}

fn mode(q: &str) -> Result<QMode, String> {
    q.parse().map_err(err)
}

fn build<F: ParamField>(spec: &AlgebraSpec, mode: &QMode) -> Result<Algebra<F>, String> {
    Algebra::new(spec, mode).map_err(err)
}

fn verify_impl<F: ParamField>(spec: &AlgebraSpec, mode: &QMode, w: &Window) -> Result<Value, String> {
    let a: Algebra<F> = build(spec, mode)?;
    let anti = a.verify_antisymmetry(w).map_err(err)?;
    let jac = a.verify_jacobi(w).map_err(err)?;
    let pass = anti.pass && jac.pass;
    Ok(json!({ "algebra": spec.name, "q": mode, "window": w.to_string(), "antisymmetry": anti, "jacobi": jac, "pass": pass }))
}

fn classify_impl<F: ParamField>(
    spec: &AlgebraSpec,
    mode: &QMode,
    shift: Parity,
    bounds: (i64, i64),
    windows: &[Window],
) -> Result<Value, String> {
    let a: Algebra<F> = build(spec, mode)?;
    let report = classify_degrees(&a, shift, bounds, windows).map_err(err)?;
    serde_json::to_value(report).map_err(err)
}

fn hom_impl<F: ParamField>(spec: &AlgebraSpec, mode: &QMode, map: &MapExpr, w: &Window) -> Result<Value, String> {
    let a: Algebra<F> = build(spec, mode)?;
    let phi = map.build::<F>(mode, &w.doubled(), spec.is_super).map_err(err)?;
    let report = hom_jacobi_check(&a, &phi, w).map_err(err)?;
    Ok(json!({ "algebra": spec.name, "q": mode, "map": map.to_string(), "window": w.to_string(), "report": report, "pass": report.pass }))
}

macro_rules! dispatch {
    ($mode:expr, $f:ident($($arg:expr),*)) => {
        match $mode {
            QMode::Generic => $f::<RatFunc>($($arg),*),
            QMode::Fixed(_) => $f::<Rational>($($arg),*),
        }
    };
}

fn finish(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Antisymmetry and Jacobi on a window.
pub fn verify_algebra_json(algebra: &str, q: &str, win: &str) -> Result<Value, String> {
    let (spec, mode, w) = (spec(algebra)?, mode(q)?, window(win)?);
    dispatch!(mode, verify_impl(&spec, &mode, &w))
}

/// ½-derivations of every degree in `|r| <= r_max`, `|s| <= s_max`, stabilized over `windows`.
pub fn classify_json(algebra: &str, q: &str, shift: &str, r_max: i64, s_max: i64, windows: &str) -> Result<Value, String> {
    let (spec, mode) = (spec(algebra)?, mode(q)?);
    let shift = match shift.trim() {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => return Err(format!("shift must be even or odd, got {other:?}")),
    };
    if !(0..=3).contains(&r_max) || !(0..=3).contains(&s_max) {
        return Err("degree bounds must lie in 0..=3".into());
    }
    let windows = windows.split(',').map(window).collect::<Result<Vec<_>, _>>()?;
    dispatch!(mode, classify_impl(&spec, &mode, shift, (r_max, s_max), &windows))
}

/// Hom-Jacobi identity for a combination such as `2*id - alpha`.
pub fn hom_check_json(algebra: &str, q: &str, map: &str, win: &str) -> Result<Value, String> {
    let (spec, mode, w) = (spec(algebra)?, mode(q)?, window(win)?);
    let map: MapExpr = map.parse().map_err(err)?;
    dispatch!(mode, hom_impl(&spec, &mode, &map, &w))
}

#[wasm_bindgen(js_name = verifyAlgebra)]
pub fn verify_algebra(algebra: &str, q: &str, window: &str) -> Result<String, JsValue> {
    finish(verify_algebra_json(algebra, q, window))
}

#[wasm_bindgen]
pub fn classify(algebra: &str, q: &str, shift: &str, r_max: i32, s_max: i32, windows: &str) -> Result<String, JsValue> {
    finish(classify_json(algebra, q, shift, r_max.into(), s_max.into(), windows))
}

#[wasm_bindgen(js_name = homCheck)]
pub fn hom_check(algebra: &str, q: &str, map: &str, window: &str) -> Result<String, JsValue> {
    finish(hom_check_json(algebra, q, map, window))
}
