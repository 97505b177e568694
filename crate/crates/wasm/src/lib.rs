//! Browser bindings for a few effective-Hamiltonian computations.
//!
//! Every exported function returns a JSON string. The `*_json` helpers hold
//! the logic and are plain Rust so they can be tested natively.

use effham_core::ham1d::{NonconvexProfile, QuasiConvexProfile};
use effham_core::hill::viscous_effective_h;
use effham_core::inviscid1d::{effective_h_quasiconvex, pplus_sawtooth};
use effham_core::potential::{cdf_distance, Potential, PotentialDescriptor};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const PROFILE_SAMPLES: usize = 200;
const CDF_RESOLUTION: usize = 2048;

fn potential(json: &str) -> Result<Potential, String> {
    PotentialDescriptor::parse(json).and_then(|d| d.build()).map_err(|e| e.to_string())
}

fn profile(v: &Potential) -> Vec<[f64; 2]> {
    (0..=PROFILE_SAMPLES)
        .map(|i| {
            let x = i as f64 / PROFILE_SAMPLES as f64;
            [x, v.eval(x)]
        })
        .collect()
}

/// Inviscid and viscous effective Hamiltonians of `p² + V(x)` on `[0, p_max]`.
pub fn effective_curves_json(potential_json: &str, p_max: f64, points: usize, d: f64) -> Result<Value, String> {
    if !(p_max > 0.0 && p_max.is_finite()) || !(2..=2000).contains(&points) || d.is_nan() || d <= 0.0 {
        return Err("need p_max > 0, 2 ≤ points ≤ 2000 and d > 0".into());
    }
    let v = potential(potential_json)?;
    let h = QuasiConvexProfile::power(2.0, 0.0).map_err(|e| e.to_string())?;
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let p = p_max * i as f64 / (points - 1) as f64;
        let inviscid = effective_h_quasiconvex(&h, &v, p).map_err(|e| e.to_string())?;
        let viscous = viscous_effective_h(&v, p, d).map_err(|e| e.to_string())?;
        rows.push(json!({
            "p": p,
            "inviscid": inviscid,
            "viscous": viscous,
            "lower": p * p + v.mean(),
            "upper": p * p + v.max(),
        }));
    }
    Ok(json!({ "curve": rows, "profile": profile(&v), "mean": v.mean(), "max": v.max() }))
}

/// Right edge of the flat piece for the nonconvex profile over a sawtooth.
pub fn flat_piece_edge_json(theta1: f64, theta2: f64, s: f64) -> Result<Value, String> {
    let f = NonconvexProfile::new(theta1, theta2).map_err(|e| e.to_string())?;
    let edges: Vec<[f64; 2]> = (0..=50)
        .map(|i| {
            let t = 0.02 * i as f64;
            [t, pplus_sawtooth(&f, t).unwrap_or(f64::NAN)]
        })
        .filter(|e| e[1].is_finite())
        .collect();
    let pplus = pplus_sawtooth(&f, s).map_err(|e| e.to_string())?;
    Ok(json!({ "s": s, "pplus": pplus, "theta3": f.theta3(), "sweep": edges }))
}

/// Distribution functions of one or two potentials and their sup distance.
pub fn distributions_json(potential_json: &str, compare_json: &str) -> Result<Value, String> {
    let a = potential(potential_json)?;
    let b = potential(compare_json)?;
    let fa = a.cdf(CDF_RESOLUTION);
    let fb = b.cdf(CDF_RESOLUTION);
    Ok(json!({
        "first": { "cdf": fa.knots(), "profile": profile(&a) },
        "second": { "cdf": fb.knots(), "profile": profile(&b) },
        "distance": cdf_distance(&fa, &fb),
    }))
}

fn export(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = effectiveCurves)]
pub fn effective_curves(potential_json: &str, p_max: f64, points: usize, d: f64) -> Result<String, JsValue> {
    export(effective_curves_json(potential_json, p_max, points, d))
}

#[wasm_bindgen(js_name = flatPieceEdge)]
pub fn flat_piece_edge(theta1: f64, theta2: f64, s: f64) -> Result<String, JsValue> {
    export(flat_piece_edge_json(theta1, theta2, s))
}

#[wasm_bindgen(js_name = distributions)]
pub fn distributions(potential_json: &str, compare_json: &str) -> Result<String, JsValue> {
    export(distributions_json(potential_json, compare_json))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_respect_bounds() {
        let out = effective_curves_json(r#"{"type":"sawtooth","s":0.3}"#, 2.0, 21, 1.0).unwrap();
        for row in out["curve"].as_array().unwrap() {
            let g = |k: &str| row[k].as_f64().unwrap();
            assert!(g("lower") <= g("inviscid") + 1e-9 && g("inviscid") <= g("upper") + 1e-9);
            assert!(g("lower") <= g("viscous") + 1e-6 && g("viscous") <= g("upper") + 1e-6);
        }
        assert_eq!(out["profile"].as_array().unwrap().len(), PROFILE_SAMPLES + 1);
    }

    #[test]
    fn edge_matches_closed_form() {
        let out = flat_piece_edge_json(2.0, 1.5, 0.4).unwrap();
        let p = out["pplus"].as_f64().unwrap();
        assert!((p - (57.0 + 5.0 * 0.4) / 36.0).abs() < 1e-9);
    }

    #[test]
    fn sawtooth_distributions_agree() {
        let out = distributions_json(r#"{"type":"sawtooth","s":0.2}"#, r#"{"type":"sawtooth","s":0.7}"#).unwrap();
        assert!(out["distance"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(effective_curves_json("{", 1.0, 10, 1.0).is_err());
        assert!(effective_curves_json(r#"{"type":"sawtooth","s":0.3}"#, -1.0, 10, 1.0).is_err());
        assert!(flat_piece_edge_json(1.0, 2.0, 0.5).is_err());
    }
}
