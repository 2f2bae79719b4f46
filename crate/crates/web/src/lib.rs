//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain arguments and returns a JSON string. The same
//! functions without the `wasm_bindgen` wrappers are available natively.

use hypar_core::analysis::{cross_section, fit_and_deviate};
use hypar_core::embedcheck::{check_embedding, max_rings, DigitsPolicy, MaxRings, Verdict3};
use hypar_core::foldctor::{construct_auto, parse_angle};
use hypar_core::{FoldState, TriangulationKind};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest precision the page will escalate to.
pub const WEB_DIGITS_MAX: u32 = 1024;
/// Largest ring count the page will build.
pub const WEB_RINGS_MAX: u32 = 120;

fn inputs(kind: &str, n: u32, theta: &str) -> Result<(TriangulationKind, FoldState, u32), String> {
    let kind: TriangulationKind = kind.parse().map_err(|e| format!("{e}"))?;
    if n == 0 || n > WEB_RINGS_MAX {
        return Err(format!("n must be between 1 and {WEB_RINGS_MAX}"));
    }
    let theta = parse_angle(theta)?;
    let (state, digits) = construct_auto(n, &theta, kind, 16, WEB_DIGITS_MAX).map_err(|e| e.to_string())?;
    Ok((kind, state, digits))
}

#[derive(Serialize)]
struct Mesh {
    digits: u32,
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    /// Creases as vertex index pairs with their realized sign (0 on the boundary).
    creases: Vec<(usize, usize, i32)>,
    mv_violations: usize,
    max_width: String,
}

fn mesh_of(state: &FoldState, digits: u32) -> Mesh {
    Mesh {
        digits,
        vertices: state.positions.iter().map(|p| p.mid_f64()).collect(),
        faces: state.pattern.faces.iter().map(|f| f.map(|v| v.index())).collect(),
        creases: state
            .pattern
            .creases
            .iter()
            .zip(&state.signs)
            .map(|(c, s)| (c.endpoints.0.index(), c.endpoints.1.index(), s.unwrap_or(0)))
            .collect(),
        mv_violations: state.diagnostics.mv_violations.len(),
        max_width: state.max_width().to_string(),
    }
}

/// Folded midpoint mesh with crease signs.
pub fn fold_mesh_json(kind: &str, n: u32, theta: &str) -> Result<String, String> {
    let (_, state, digits) = inputs(kind, n, theta)?;
    serde_json::to_string(&mesh_of(&state, digits)).map_err(|e| e.to_string())
}

/// Cross-section rows and per-parity fits.
pub fn cross_section_json(kind: &str, n: u32, theta: &str) -> Result<String, String> {
    let (_, state, digits) = inputs(kind, n, theta)?;
    let cs = cross_section(&state).map_err(|e| e.to_string())?;
    let fit = fit_and_deviate(&cs).map_err(|e| e.to_string())?;
    let max_dev = fit.max_abs_deviation();
    Ok(json!({ "digits": digits, "fit": fit, "max_abs_deviation": max_dev }).to_string())
}

/// Embedding verdict of one state and the frontier for its angle and kind.
pub fn embedding_json(kind: &str, n: u32, theta: &str) -> Result<String, String> {
    let (kind, state, digits) = inputs(kind, n, theta)?;
    let report = check_embedding(&state);
    let verdict = match &report.verdict {
        Verdict3::CertainlyEmbedded => json!({ "verdict": "embedded" }),
        Verdict3::CertainlyIntersecting(p) => json!({ "verdict": "intersecting", "pair": p.to_string() }),
        Verdict3::Indeterminate(p) => json!({ "verdict": "indeterminate", "pair": p.to_string() }),
    };
    let frontier = max_rings(&state.theta_deg, kind, WEB_RINGS_MAX, DigitsPolicy { start: 16, max: WEB_DIGITS_MAX })
        .map_err(|e| e.to_string())?;
    let limit = match frontier.result {
        MaxRings::Exact { n, .. } => json!({ "n": n, "exact": true }),
        MaxRings::AtCap { n } => json!({ "n": n, "exact": false, "note": "reached the page's ring cap" }),
        MaxRings::Unknown { at_least, reason } => json!({ "n": at_least, "exact": false, "note": reason }),
    };
    Ok(json!({
        "digits": digits,
        "pairs": report.stats.pairs,
        "embedding": verdict,
        "frontier": limit,
        "ms": report.wall_time_ms as u64,
    })
    .to_string())
}

#[wasm_bindgen(js_name = foldMesh)]
pub fn fold_mesh(kind: &str, n: u32, theta: &str) -> Result<String, JsValue> {
    fold_mesh_json(kind, n, theta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = crossSection)]
pub fn cross_section_js(kind: &str, n: u32, theta: &str) -> Result<String, JsValue> {
    cross_section_json(kind, n, theta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn embedding(kind: &str, n: u32, theta: &str) -> Result<String, JsValue> {
    embedding_json(kind, n, theta).map_err(|e| JsValue::from_str(&e))
}
