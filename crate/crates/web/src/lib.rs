//! Browser bindings. Each exported function returns a JSON string for the page to plot.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use gravkerr::fock::{numeric_qfi, StepPolicy};
use gravkerr::interferometer::{noise_penalty_db, MeasurementPlan};
use gravkerr::runner::{run_sweep, SweepRow, SweepSpec};
use gravkerr::{analytic, Geometry, Probe};

#[derive(Serialize)]
struct Curves {
    chi: Vec<f64>,
    rows: Vec<SweepRow>,
}

/// Error-bound curves against photon number on the desk-scale geometry.
pub fn bound_curves_json(
    chis: &[f64],
    h: f64,
    arm_length: f64,
    eps_a: f64,
    eps_b: f64,
) -> Result<String, String> {
    let spec = SweepSpec {
        n_decade_min: 6,
        n_decade_max: 22,
        points_per_decade: 8,
        geometry: Geometry::new(
            gravkerr::schwarzschild::EARTH_SCHWARZSCHILD_RADIUS,
            gravkerr::schwarzschild::EARTH_RADIUS,
            h,
            arm_length,
            1.0,
        )
        .map_err(|e| e.to_string())?,
        plan: MeasurementPlan::lossless(10_000_000_000).with_losses(eps_a, eps_b),
        ..SweepSpec::desk_scale(chis.to_vec())
    };
    let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
    serde_json::to_string(&Curves {
        chi: chis.to_vec(),
        rows,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PenaltyPoint {
    delta_beta: f64,
    penalty_db: f64,
}

/// Excess homodyne noise against the offset of β from its optimum.
pub fn noise_penalty_json(
    photon_number: f64,
    chi: f64,
    max_offset: f64,
    points: usize,
) -> Result<String, String> {
    if points < 2 || max_offset.is_nan() || max_offset <= 0.0 {
        return Err("need at least 2 points and a positive offset range".into());
    }
    let probe = Probe::new(photon_number, 1e14, chi);
    let g = Geometry::earth(10.0, 0.01);
    let curve = (0..points)
        .map(|i| {
            let delta_beta = -max_offset + 2.0 * max_offset * i as f64 / (points - 1) as f64;
            noise_penalty_db(&probe, &g, delta_beta).map(|penalty_db| PenaltyPoint {
                delta_beta,
                penalty_db,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct QfiPoint {
    photon_number: f64,
    analytic: f64,
    numeric: f64,
}

/// Closed-form against truncated-Fock QFI over a photon-number range, natural units.
pub fn qfi_compare_json(omega: f64, chi: f64, n_max: f64, points: usize) -> Result<String, String> {
    if points < 2 || n_max.is_nan() || n_max <= 0.0 || n_max > 400.0 {
        return Err("photon numbers must lie in (0, 400] with at least 2 points".into());
    }
    let curve = (1..=points)
        .map(|i| {
            let n = n_max * i as f64 / points as f64;
            let probe = Probe::new(n, omega, chi);
            let numeric = numeric_qfi(&probe, 1.0, StepPolicy::default())?.value;
            let analytic = analytic::qfi_kerr(&probe)?.value;
            Ok(QfiPoint {
                photon_number: n,
                analytic,
                numeric,
            })
        })
        .collect::<gravkerr::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn bound_curves(
    chis: Vec<f64>,
    h: f64,
    arm_length: f64,
    eps_a: f64,
    eps_b: f64,
) -> Result<String, JsValue> {
    bound_curves_json(&chis, h, arm_length, eps_a, eps_b).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn noise_penalty(
    photon_number: f64,
    chi: f64,
    max_offset: f64,
    points: usize,
) -> Result<String, JsValue> {
    noise_penalty_json(photon_number, chi, max_offset, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn qfi_compare(omega: f64, chi: f64, n_max: f64, points: usize) -> Result<String, JsValue> {
    qfi_compare_json(omega, chi, n_max, points).map_err(|e| JsValue::from_str(&e))
}
