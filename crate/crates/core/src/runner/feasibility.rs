//! Material, power and improvement calculators for the experimental estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interferometer::{quadrature_bound_rs, sql_bound_rs, MeasurementPlan};
use crate::probe::Probe;
use crate::schwarzschild::Geometry;
use crate::{HBAR, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityInput {
    /// Second-order refractive index ñ, m²/W.
    pub n_tilde: f64,
    pub n0: f64,
    /// Beam area, m².
    pub area: f64,
    /// Pulse duration, s.
    pub dt: f64,
    pub omega: f64,
    pub photon_number: f64,
}

impl FeasibilityInput {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n_tilde", self.n_tilde),
            ("n0", self.n0),
            ("area", self.area),
            ("dt", self.dt),
            ("omega", self.omega),
            ("photon_number", self.photon_number),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// ỹ = Nχn′/ω.
pub fn y_tilde(probe: &Probe, n_prime: f64) -> Result<f64> {
    if !(probe.omega > 0.0) {
        return Err(Error::invalid("omega", "y_tilde needs omega > 0"));
    }
    Ok(probe.photon_number() * probe.chi * n_prime / probe.omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearRegime {
    Linear,
    Significant,
    Dominant,
}

/// Linear below ỹ = 1, dominant from ỹ = 100.
pub fn nonlinear_regime(y_tilde: f64) -> NonlinearRegime {
    if y_tilde >= 100.0 {
        NonlinearRegime::Dominant
    } else if y_tilde >= 1.0 {
        NonlinearRegime::Significant
    } else {
        NonlinearRegime::Linear
    }
}

/// χ = (n₀/2)ωχ′ with χ′ = (ñ/n₀)ħω/(AΔt).
pub fn chi_from_material(inp: &FeasibilityInput) -> Result<f64> {
    inp.validate()?;
    let chi_prime = inp.n_tilde / inp.n0 * HBAR * inp.omega / (inp.area * inp.dt);
    Ok(0.5 * inp.n0 * inp.omega * chi_prime)
}

/// χ from a single-photon nonlinear phase φ = χτ, τ = index·L/c.
pub fn chi_from_single_photon_phase(phase: f64, length: f64, index: f64) -> Result<f64> {
    if !(length > 0.0 && index > 0.0 && phase >= 0.0) {
        return Err(Error::invalid(
            "fibre",
            "length and index must be positive, phase >= 0",
        ));
    }
    Ok(phase * SPEED_OF_LIGHT / (index * length))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEstimate {
    /// Nħω/Δt, W.
    pub peak_w: f64,
    /// NħωM for M pulses per second, W.
    pub average_w: f64,
}

pub fn peak_power(
    photon_number: f64,
    omega: f64,
    dt: f64,
    repetition_rate: f64,
) -> Result<PowerEstimate> {
    for (name, v) in [
        ("photon_number", photon_number),
        ("omega", omega),
        ("dt", dt),
    ] {
        if !(v > 0.0) {
            return Err(Error::invalid(name, "must be positive"));
        }
    }
    if !(repetition_rate >= 0.0) {
        return Err(Error::invalid("repetition_rate", "must be >= 0"));
    }
    let energy = photon_number * HBAR * omega;
    Ok(PowerEstimate {
        peak_w: energy / dt,
        average_w: energy * repetition_rate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Improvement {
    /// SQL bound over quadrature bound, (ω/n′ + Nχ)/(ω/n′).
    pub ratio: f64,
    pub sql: f64,
    pub quadrature: f64,
}

pub fn report_improvement(
    probe: &Probe,
    geometry: &Geometry,
    repetitions: u64,
) -> Result<Improvement> {
    let sql = sql_bound_rs(probe, geometry, repetitions)?.relative_error;
    let quadrature = quadrature_bound_rs(probe, geometry, &MeasurementPlan::lossless(repetitions))?
        .relative_error;
    Ok(Improvement {
        ratio: sql / quadrature,
        sql,
        quadrature,
    })
}
