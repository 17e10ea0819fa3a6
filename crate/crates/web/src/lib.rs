//! Browser bindings for the static demo page in `www/`.
//!
//! States cross the boundary as six floats `[re1, im1, re2, im2, re3, im3]`
//! and analyzer modes as `(theta, phi)`. Structured results are returned as
//! JSON strings. Each binding is a thin wrapper over a plain Rust function so
//! the logic can be tested natively.

use biphoton::braun_twiss::{self, Arm, DetectorTuning};
use biphoton::{BiphotonState, PolarizationMode, StandardState};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Amplitudes of a named state (`HV`, `RL`, `DDb`, `HH`, ...).
pub fn named_amplitudes(name: &str) -> Result<Vec<f64>, String> {
    let state = name.parse::<StandardState>().map_err(|e| e.to_string())?.state();
    Ok(flatten(&state))
}

/// Amplitudes, Poincaré pair, degree of polarization and Stokes vector.
/// The amplitudes are normalized first; an all-zero vector is an error.
pub fn state_report(c: &[f64]) -> Result<String, String> {
    let state = parse_state(c)?;
    let pair = state.to_modes().map_err(|e| e.to_string())?;
    let p = state.degree_of_polarization().map_err(|e| e.to_string())?;
    let report = json!({
        "c": flatten(&state),
        "photons": [
            { "theta": pair.first.theta, "phi": pair.first.phi, "vector": pair.first.poincare_vector() },
            { "theta": pair.second.theta, "phi": pair.second.phi, "vector": pair.second.poincare_vector() },
        ],
        "global_phase": pair.global_phase,
        "degree_of_polarization": p,
        "stokes": state.mean_stokes(),
    });
    Ok(report.to_string())
}

/// Coincidence probabilities for detectors tuned to `(theta1, phi1)` in arm 1
/// and `(theta2, phi2)` in arm 2.
pub fn coincidence_report(c: &[f64], theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<String, String> {
    let state = parse_state(c)?;
    let tuning = DetectorTuning::new(PolarizationMode::new(theta1, phi1), PolarizationMode::new(theta2, phi2));
    let r = braun_twiss::coincidence_probability(&state, &tuning);
    let report = json!({
        "exact_probability": r.exact_probability,
        "overlap_squared": r.overlap_squared,
        "same_arm_probability": r.same_arm_probability,
        "orthogonal": braun_twiss::orthogonality_test(&state, &tuning, 1e-10),
    });
    Ok(report.to_string())
}

/// Singles intensity over a `(steps + 1) × 2·steps` grid of analyzer
/// settings, row-major in `theta`.
pub fn scan_intensities(c: &[f64], arm: u8, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 {
        return Err("steps must be positive".into());
    }
    let state = parse_state(c)?;
    let arm = Arm::from_index(arm).map_err(|e| e.to_string())?;
    Ok(braun_twiss::grid_scan(&state, arm, steps)
        .into_iter()
        .map(|p| p.intensity)
        .collect())
}

fn parse_state(c: &[f64]) -> Result<BiphotonState, String> {
    if c.len() != 6 {
        return Err(format!("expected 6 numbers, got {}", c.len()));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err("amplitudes must be finite".into());
    }
    let z = |k: usize| Complex64::new(c[2 * k], c[2 * k + 1]);
    BiphotonState::normalize(z(0), z(1), z(2)).map_err(|e| e.to_string())
}

fn flatten(state: &BiphotonState) -> Vec<f64> {
    state.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect()
}

#[wasm_bindgen(js_name = namedAmplitudes)]
pub fn named_amplitudes_js(name: &str) -> Result<Vec<f64>, JsError> {
    named_amplitudes(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = stateReport)]
pub fn state_report_js(c: &[f64]) -> Result<String, JsError> {
    state_report(c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = coincidence)]
pub fn coincidence_js(c: &[f64], theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<String, JsError> {
    coincidence_report(c, theta1, phi1, theta2, phi2).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = scanIntensities)]
pub fn scan_intensities_js(c: &[f64], arm: u8, steps: usize) -> Result<Vec<f64>, JsError> {
    scan_intensities(c, arm, steps).map_err(|e| JsError::new(&e))
}
