//! Browser bindings for a few conical-phase computations.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the logic is testable
//! off the browser; the exports only convert errors.

use conical_phase::ci::{locate_complex_cis, predicted_loop_phase};
use conical_phase::dynamics::{
    adiabatic_populations, closed_form_amplitudes, geometric_phase_extract, DoubletDynamics, Monopole3D,
    MonopoleState, berry3d_phase,
};
use conical_phase::model::ComplexCoupling;
use conical_phase::tracing::{trace_phase, LoopSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Intersections of the quartic complex model as a JSON array of `{x, y, q, sign}`.
pub fn quartic_cis_json(k: f64, mu: f64, lambda: f64) -> Result<String, String> {
    let m = ComplexCoupling::quartic(k, mu, lambda).map_err(err)?;
    let cis = locate_complex_cis(&m).map_err(err)?;
    let rows: Vec<_> = cis
        .iter()
        .map(|c| json!({"x": c.x, "y": c.y, "q": c.q, "sign": c.sign.value()}))
        .collect();
    Ok(serde_json::Value::from(rows).to_string())
}

/// Traced and predicted phase windings (units of π) for a circle in the quartic model.
pub fn loop_winding(k: f64, mu: f64, lambda: f64, cx: f64, cy: f64, r: f64) -> Result<Vec<i32>, String> {
    let m = ComplexCoupling::quartic(k, mu, lambda).map_err(err)?;
    let spec = LoopSpec::planar(cx, cy, r).map_err(err)?;
    let traced = trace_phase(&m, &spec).map_err(err)?;
    let predicted = predicted_loop_phase(&locate_complex_cis(&m).map_err(err)?, &spec).map_err(err)?;
    Ok(vec![traced.winding, predicted])
}

/// Flattened `[t, lower, upper, ...]` instantaneous-eigenstate populations over one period.
pub fn doublet_populations(g: f64, omega: f64, excited: bool, samples: usize) -> Result<Vec<f64>, String> {
    let d = if excited {
        DoubletDynamics::excited(g, omega)
    } else {
        DoubletDynamics::ground(g, omega)
    }
    .map_err(err)?;
    if samples < 2 || omega <= 0.0 {
        return Err("need omega > 0 and at least two samples".into());
    }
    let period = d.period();
    let mut out = Vec::with_capacity(3 * samples);
    for k in 0..samples {
        let t = period * k as f64 / (samples - 1) as f64;
        let (lo, up) = adiabatic_populations(&d, t, closed_form_amplitudes(&d, t));
        out.extend([t, lo, up]);
    }
    Ok(out)
}

/// Topological phase over one period.
pub fn doublet_phase(g: f64, omega: f64, excited: bool) -> Result<f64, String> {
    let d = if excited {
        DoubletDynamics::excited(g, omega)
    } else {
        DoubletDynamics::ground(g, omega)
    }
    .map_err(err)?;
    geometric_phase_extract(&d).map(|p| p.phase).map_err(err)
}

/// `[lower, upper]` Berry phases of the cap `θ ≤ theta`.
pub fn cap_phases(theta: f64) -> Result<Vec<f64>, String> {
    let cap = Monopole3D::cap(theta).map_err(err)?;
    Ok(vec![
        berry3d_phase(&cap, MonopoleState::Lower),
        berry3d_phase(&cap, MonopoleState::Upper),
    ])
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = quarticCis)]
pub fn quartic_cis_js(k: f64, mu: f64, lambda: f64) -> Result<String, JsError> {
    js(quartic_cis_json(k, mu, lambda))
}

#[wasm_bindgen(js_name = loopWinding)]
pub fn loop_winding_js(k: f64, mu: f64, lambda: f64, cx: f64, cy: f64, r: f64) -> Result<Vec<i32>, JsError> {
    js(loop_winding(k, mu, lambda, cx, cy, r))
}

#[wasm_bindgen(js_name = doubletPopulations)]
pub fn doublet_populations_js(g: f64, omega: f64, excited: bool, samples: usize) -> Result<Vec<f64>, JsError> {
    js(doublet_populations(g, omega, excited, samples))
}

#[wasm_bindgen(js_name = doubletPhase)]
pub fn doublet_phase_js(g: f64, omega: f64, excited: bool) -> Result<f64, JsError> {
    js(doublet_phase(g, omega, excited))
}

#[wasm_bindgen(js_name = capPhases)]
pub fn cap_phases_js(theta: f64) -> Result<Vec<f64>, JsError> {
    js(cap_phases(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quartic_exports() {
        let v: serde_json::Value = serde_json::from_str(&quartic_cis_json(1.0, 0.3, 0.003).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 10);
        assert_eq!(loop_winding(1.0, 0.3, 0.003, 0.0, 0.0, 5.0).unwrap(), vec![2, 2]);
        assert!(quartic_cis_json(1.0, 0.3, f64::NAN).is_err());
    }

    #[test]
    fn doublet_exports() {
        let p = doublet_populations(20.0, 1.0, false, 5).unwrap();
        assert_eq!(p.len(), 15);
        assert!((p[1] + p[2] - 1.0).abs() < 1e-12);
        assert!((doublet_phase(100.0, 1.0, true).unwrap() - PI).abs() < 0.1);
        assert!(doublet_phase(2.0, 1.0, true).is_err());
    }

    #[test]
    fn cap_export() {
        let c = cap_phases(PI / 2.0).unwrap();
        assert!((c[0] + PI).abs() < 1e-12 && (c[1] - PI).abs() < 1e-12);
        assert!(cap_phases(4.0).is_err());
    }
}
