//! WebAssembly bindings for the browser demo. Each export takes plain
//! numbers or JSON strings and returns a JSON string.

use hardy_lab::classify::{classify_operator, Tolerances};
use hardy_lab::function::FunctionSpec;
use hardy_lab::operators::{build_operator, Conjugation};
use hardy_lab::spectral::diagonal_spectrum;
use hardy_lab::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest truncation the page may request.
pub const MAX_TRUNC: usize = 96;

fn check_trunc(trunc: usize) -> Result<(), String> {
    if trunc == 0 || trunc > MAX_TRUNC {
        return Err(format!("truncation must lie in 1..={MAX_TRUNC}"));
    }
    Ok(())
}

fn parse_spec(text: &str) -> Result<FunctionSpec, String> {
    let spec: FunctionSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// `log10 |M[i][j]|` of the truncated matrix, row-major; exact zeros map to `null`.
pub fn heatmap_json(u: &str, phi: &str, m: usize, trunc: usize) -> Result<String, String> {
    check_trunc(trunc)?;
    let (u, phi) = (parse_spec(u)?, parse_spec(phi)?);
    let op = build_operator(
        &u.series(trunc).map_err(|e| e.to_string())?,
        &phi.series(trunc).map_err(|e| e.to_string())?,
        m,
        trunc,
    )
    .map_err(|e| e.to_string())?;
    let e = op.entries();
    let cells: Vec<Option<f64>> = (0..trunc)
        .flat_map(|r| (0..trunc).map(move |c| (r, c)))
        .map(|(r, c)| {
            let v = e[(r, c)].norm();
            (v > 0.0).then(|| v.log10())
        })
        .collect();
    Ok(json!({
        "trunc": trunc,
        "phi_sup_norm": op.meta().map(|p| p.phi_sup_norm),
        "log10_abs": cells,
    })
    .to_string())
}

/// Eigenvalues of `u = a z, phi = c z` with the measured and closed-form norms.
pub fn spectrum_json(a: f64, c: f64, trunc: usize) -> Result<String, String> {
    check_trunc(trunc)?;
    let s = diagonal_spectrum(a, c, trunc).map_err(|e| e.to_string())?;
    Ok(json!({
        "entries": s.entries,
        "k_star": s.k_star,
        "maximizers": s.maximizers(),
        "oracle_norm": s.norm,
        "paper_k": s.paper_k,
        "paper_norm": s.paper_norm,
    })
    .to_string())
}

/// Class residuals and verdicts for `u, phi` under `C_{lambda,alpha}` with
/// `lambda = e^{i lambda_angle}`, `alpha = e^{i alpha_angle}`.
pub fn residuals_json(
    u: &str,
    phi: &str,
    lambda_angle: f64,
    alpha_angle: f64,
    trunc: usize,
) -> Result<String, String> {
    check_trunc(trunc)?;
    let (u_spec, phi_spec) = (parse_spec(u)?, parse_spec(phi)?);
    let conj = Conjugation::new(
        Complex64::from_polar(1.0, lambda_angle),
        Complex64::from_polar(1.0, alpha_angle),
    )
    .map_err(|e| e.to_string())?;
    let mobius = phi_spec.as_mobius();
    let report = classify_operator(
        &u_spec.series(trunc).map_err(|e| e.to_string())?,
        &phi_spec.series(trunc).map_err(|e| e.to_string())?,
        mobius.as_ref(),
        &conj,
        trunc,
        Tolerances::default(),
    )
    .map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn heatmap(u: &str, phi: &str, m: usize, trunc: usize) -> Result<String, JsValue> {
    heatmap_json(u, phi, m, trunc).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(a: f64, c: f64, trunc: usize) -> Result<String, JsValue> {
    spectrum_json(a, c, trunc).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn residuals(
    u: &str,
    phi: &str,
    lambda_angle: f64,
    alpha_angle: f64,
    trunc: usize,
) -> Result<String, JsValue> {
    residuals_json(u, phi, lambda_angle, alpha_angle, trunc).map_err(|e| JsValue::from_str(&e))
}
