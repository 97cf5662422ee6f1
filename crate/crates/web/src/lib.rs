//! Browser bindings. Every export takes plain numbers and returns JSON or
//! SVG text; the `*_impl` functions carry the logic and run natively too.

use ssys_core::dynamics::{
    bautin_search, integrate, poincare_return, BautinOptions, IntegratorOptions, Section,
};
use ssys_core::portrait::{compute_portrait, to_svg, PortraitOptions, Window};
use ssys_core::report::{classify, AnalysisInput};
use ssys_core::{ParameterScheme, Tolerance};
use wasm_bindgen::prelude::*;

fn scheme(entries: &[f64]) -> Result<ParameterScheme, String> {
    let e: [f64; 8] = entries
        .try_into()
        .map_err(|_| format!("need 8 entries a1..a4, b1..b4, got {}", entries.len()))?;
    ParameterScheme::new([e[0], e[1], e[2], e[3]], [e[4], e[5], e[6], e[7]])
        .map_err(|e| e.to_string())
}

fn json<T: serde::Serialize>(x: &T) -> Result<String, String> {
    serde_json::to_string(x).map_err(|e| e.to_string())
}

pub fn classify_impl(entries: &[f64]) -> Result<String, String> {
    let s = scheme(entries)?;
    json(&classify(&AnalysisInput::Scheme(s), &Tolerance::default()))
}

pub fn portrait_impl(entries: &[f64], half_width: f64, grid: usize) -> Result<String, String> {
    let s = scheme(entries)?;
    let opts = PortraitOptions {
        window: Window::new([-half_width, half_width], [-half_width, half_width])
            .map_err(|e| e.to_string())?,
        grid: grid.clamp(1, 15),
        integrator: IntegratorOptions::portrait(),
        detect_closed: false,
    };
    let p = compute_portrait(&s, &opts, &Tolerance::default()).map_err(|e| e.to_string())?;
    Ok(to_svg(&p))
}

/// Orbit from one point as `[[u, v], ...]` plus its termination.
pub fn orbit_impl(entries: &[f64], u: f64, v: f64, max_time: f64) -> Result<String, String> {
    let s = scheme(entries)?;
    let opts = IntegratorOptions {
        max_time,
        ..IntegratorOptions::portrait()
    };
    let tr = integrate(&s, [u, v], &opts).map_err(|e| e.to_string())?;
    let pts: Vec<[f64; 2]> = tr.samples.iter().map(|q| [q.u, q.v]).collect();
    json(&serde_json::json!({ "points": pts, "termination": tr.termination }))
}

/// `P(c) - c` on the ray at `angle` for `n` coordinates in `[c_min, c_max]`.
pub fn return_map_impl(
    entries: &[f64],
    angle: f64,
    c_min: f64,
    c_max: f64,
    n: usize,
) -> Result<String, String> {
    let s = scheme(entries)?;
    let sec = Section { angle };
    let opts = IntegratorOptions {
        max_time: 500.0,
        ..IntegratorOptions::oracle()
    };
    let n = n.clamp(1, 200);
    let rows: Vec<serde_json::Value> = (0..n)
        .map(|i| {
            let c = if n == 1 {
                c_min
            } else {
                c_min + (c_max - c_min) * i as f64 / (n - 1) as f64
            };
            match poincare_return(&s, sec, c, &opts) {
                Ok(x) => serde_json::json!({ "c": c, "displacement": x.coordinate - c }),
                Err(e) => serde_json::json!({ "c": c, "error": e.to_string() }),
            }
        })
        .collect();
    json(&rows)
}

pub fn bautin_impl() -> Result<String, String> {
    let r = bautin_search(&BautinOptions::default(), &Tolerance::default())
        .map_err(|e| e.to_string())?;
    json(&r)
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify_scheme(entries: &[f64]) -> Result<String, JsValue> {
    js(classify_impl(entries))
}

#[wasm_bindgen]
pub fn portrait_svg(entries: &[f64], half_width: f64, grid: usize) -> Result<String, JsValue> {
    js(portrait_impl(entries, half_width, grid))
}

#[wasm_bindgen]
pub fn orbit(entries: &[f64], u: f64, v: f64, max_time: f64) -> Result<String, JsValue> {
    js(orbit_impl(entries, u, v, max_time))
}

#[wasm_bindgen]
pub fn return_map(
    entries: &[f64],
    angle: f64,
    c_min: f64,
    c_max: f64,
    n: usize,
) -> Result<String, JsValue> {
    js(return_map_impl(entries, angle, c_min, c_max, n))
}

#[wasm_bindgen]
pub fn bautin_demo() -> Result<String, JsValue> {
    js(bautin_impl())
}
