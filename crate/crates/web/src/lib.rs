//! wasm-bindgen bindings for the static demo in `www/`.
//!
//! Every entry point takes the drive in ratio form: `x = 2Ω/ω₀`,
//! `freq_ratio = ω₀/ω`, `omega_over_gamma = ω/γ` and the phase φ in radians.

use lfdecay::spectrum::{gamma_bar, harmonic_amplitudes, TruncationPolicy};
use lfdecay::{derive, evolve, DriveParams, Error, EvolveOptions, ModelOrder};
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsValue {
    JsValue::from_str(&format!("{} (exit code {})", e, e.exit_code()))
}

fn setup(x: f64, freq_ratio: f64, omega_over_gamma: f64, phase: f64, order: &str) -> Result<(DriveParams, ModelOrder), JsValue> {
    let order: ModelOrder = order.parse().map_err(|e: String| JsValue::from_str(&e))?;
    let p = DriveParams::from_ratios(x, freq_ratio, omega_over_gamma, phase).map_err(|e| js_err(e.into()))?;
    Ok((p, order))
}

/// Upper-level inversion on `samples` uniform points of [0, t_end].
///
/// Returns `3·samples` values: the grid, the raw ⟨S_z⟩ and the
/// carrier-averaged ⟨S_z⟩, one block after another.
#[wasm_bindgen]
pub fn sz_trajectory(
    x: f64,
    freq_ratio: f64,
    omega_over_gamma: f64,
    phase: f64,
    order: &str,
    t_end: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    let (p, order) = setup(x, freq_ratio, omega_over_gamma, phase, order)?;
    let opts = EvolveOptions {
        t_end,
        samples,
        ..Default::default()
    };
    let traj = evolve(&p, order, &opts).map_err(js_err)?;
    traj.check_invariants().map_err(js_err)?;
    let mut out = traj.grid;
    out.extend(traj.sz);
    out.extend(traj.sz_secular);
    Ok(out)
}

/// γ̄(t)/γ on `samples` uniform points of [0, t_end].
#[wasm_bindgen]
pub fn rate_curve(
    x: f64,
    freq_ratio: f64,
    omega_over_gamma: f64,
    phase: f64,
    order: &str,
    t_end: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    let (p, order) = setup(x, freq_ratio, omega_over_gamma, phase, order)?;
    if !order.is_rotated() {
        return Err(JsValue::from_str("the rate is defined for orders 2 and 8"));
    }
    let p = p.scaled();
    let d = derive(&p, order).map_err(|e| js_err(e.into()))?;
    let spec = harmonic_amplitudes(&d, &p, order, &TruncationPolicy::default()).map_err(js_err)?;
    let n = samples.max(2);
    Ok((0..n)
        .map(|i| gamma_bar(t_end * i as f64 / (n - 1) as f64, &spec, &p))
        .collect())
}

/// Harmonic amplitudes A_k as `[k_min, A_{k_min}, …, A_{k_max}]`.
#[wasm_bindgen]
pub fn harmonic_spectrum(x: f64, freq_ratio: f64, order: &str) -> Result<Vec<f64>, JsValue> {
    let (p, order) = setup(x, freq_ratio, 1.0, 0.0, order)?;
    if !order.is_rotated() {
        return Err(JsValue::from_str("the spectrum is defined for orders 2 and 8"));
    }
    let p = p.scaled();
    let d = derive(&p, order).map_err(|e| js_err(e.into()))?;
    let spec = harmonic_amplitudes(&d, &p, order, &TruncationPolicy::default()).map_err(js_err)?;
    let mut out = vec![spec.k_min as f64];
    out.extend(spec.amplitudes);
    Ok(out)
}
