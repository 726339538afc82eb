//! Browser bindings for the capacity demo page in `www/`.
//!
//! Each export wraps a plain function so the numerics run and test natively.

use wasm_bindgen::prelude::*;

use sinecap::capacity::alpha_c;
use sinecap::replica::{psi, saddle_q, ReplicaPoint, SeriesConfig};

const TOL: f64 = 1e-12;

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err("need at least 2 points and lo < hi".into());
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

/// `α_c(λ)` at `points` evenly spaced `λ` in `[lmin, lmax]`.
pub fn capacity_values(lmin: f64, lmax: f64, points: usize) -> Result<Vec<f64>, String> {
    if lmin < 0.0 {
        return Err("lambda must be >= 0".into());
    }
    grid(lmin, lmax, points)?
        .into_iter()
        .map(|l| alpha_c(l, TOL).map_err(|e| e.to_string()))
        .collect()
}

/// `Ψ(λ, q, ω)` at `points` evenly spaced `ω` in `[wmin, wmax]`.
pub fn psi_values(lambda: f64, q: f64, wmin: f64, wmax: f64, points: usize) -> Result<Vec<f64>, String> {
    let cfg = SeriesConfig::default();
    grid(wmin, wmax, points)?
        .into_iter()
        .map(|w| {
            let pt = ReplicaPoint::new(lambda, q, w).map_err(|e| e.to_string())?;
            psi(pt, &cfg).map_err(|e| e.to_string())
        })
        .collect()
}

/// Saddle-point overlap `q*(α)` at `points` evenly spaced `α` in
/// `[amin, amax]`; `NaN` where no saddle point exists.
pub fn saddle_values(lambda: f64, amin: f64, amax: f64, points: usize) -> Result<Vec<f64>, String> {
    let cfg = SeriesConfig::default();
    grid(amin, amax, points)?
        .into_iter()
        .map(|a| match saddle_q(lambda, a, &cfg) {
            Ok(q) => Ok(q),
            Err(sinecap::Error::NoBracket { .. }) => Ok(f64::NAN),
            Err(e) => Err(e.to_string()),
        })
        .collect()
}

#[wasm_bindgen]
pub fn capacity_curve(lmin: f64, lmax: f64, points: usize) -> Result<Vec<f64>, JsError> {
    capacity_values(lmin, lmax, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn psi_profile(lambda: f64, q: f64, wmin: f64, wmax: f64, points: usize) -> Result<Vec<f64>, JsError> {
    psi_values(lambda, q, wmin, wmax, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn saddle_curve(lambda: f64, amin: f64, amax: f64, points: usize) -> Result<Vec<f64>, JsError> {
    saddle_values(lambda, amin, amax, points).map_err(|e| JsError::new(&e))
}
