//! Browser bindings. Each export takes plain numbers and returns a JSON string.

use wasm_bindgen::prelude::*;

pub mod ops;

fn finish(r: stabgap::Result<serde_json::Value>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Entropies of a state on `n` qudits of dimension `d`, given split
/// real and imaginary amplitudes.
#[wasm_bindgen(js_name = stateEntropies)]
pub fn state_entropies(d: usize, n: usize, re: &[f64], im: &[f64]) -> Result<String, JsError> {
    finish(ops::state_entropies(d, n, re, im))
}

/// Exact average and gap of the spin-0 sector of `faces` spins `two_j / 2`.
#[wasm_bindgen(js_name = polyhedronGap)]
pub fn polyhedron_gap(faces: usize, two_j: u32) -> Result<String, JsError> {
    finish(ops::polyhedron_gap(faces, two_j))
}

/// Majorana stars of a spin state and the entropies of both qubit encodings.
#[wasm_bindgen(js_name = majoranaStars)]
pub fn majorana_stars(two_j: u32, re: &[f64], im: &[f64]) -> Result<String, JsError> {
    finish(ops::majorana_stars(two_j, re, im))
}
