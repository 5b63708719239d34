//! JSON configuration. Keys carry SI unit suffixes; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{MeasurementPlan, LINEARIZATION_THRESHOLD};
use crate::probe::{KerrVariant, Probe};
use crate::runner::feasibility::FeasibilityInput;
use crate::runner::sweep::{SweepMethod, SweepSpec};
use crate::schwarzschild::{Geometry, EARTH_RADIUS, EARTH_SCHWARZSCHILD_RADIUS};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub probe: ProbeConfig,
    pub geometry: GeometryConfig,
    pub plan: PlanConfig,
    pub sweep: SweepConfig,
    pub feasibility: FeasibilityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub photon_number: f64,
    pub omega_rad_per_s: f64,
    pub chi_per_s: f64,
    pub kerr_variant: KerrVariant,
    pub q: u32,
    /// Evolution time for QFI comparisons.
    pub tau_s: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            photon_number: 1e17,
            omega_rad_per_s: 1e14,
            chi_per_s: 0.1,
            kerr_variant: KerrVariant::ShiftedQuadratic,
            q: 2,
            tau_s: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub r_s_m: f64,
    pub r_a_m: f64,
    pub h_m: f64,
    pub arm_length_m: f64,
    pub n_prime: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            r_s_m: EARTH_SCHWARZSCHILD_RADIUS,
            r_a_m: EARTH_RADIUS,
            h_m: 10.0,
            arm_length_m: 0.01,
            n_prime: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConfig {
    #[serde(deserialize_with = "integral_count")]
    pub repetitions: u64,
    pub eps_a: f64,
    pub eps_b: f64,
    /// Fixed homodyne angle; optimal when absent.
    pub theta_rad: Option<f64>,
    /// Fixed auxiliary phase; optimal when absent.
    pub beta_rad: Option<f64>,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            repetitions: 10_000_000_000,
            eps_a: 1.0,
            eps_b: 1.0,
            theta_rad: None,
            beta_rad: None,
        }
    }
}

/// Accepts `10000000000` as well as `1e10`, provided the value is a whole number.
fn integral_count<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<u64, D::Error> {
    let v = f64::deserialize(de)?;
    if v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(serde::de::Error::custom(format!(
            "repetitions must be a positive integer, got {v}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub n_decade_min: i32,
    pub n_decade_max: i32,
    pub points_per_decade: u32,
    pub chi_per_s: Vec<f64>,
    pub methods: Vec<SweepMethod>,
    pub validity_threshold: f64,
    /// Channel transmission for the squeezed-light baseline.
    pub squeezed_eps: f64,
    pub output_csv: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_decade_min: 6,
            n_decade_max: 22,
            points_per_decade: 4,
            chi_per_s: vec![1e-6, 1e-2, 0.1, 1.0, 6.0],
            methods: SweepMethod::ALL.to_vec(),
            validity_threshold: LINEARIZATION_THRESHOLD,
            squeezed_eps: 1.0 - 1e-6,
            output_csv: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilityConfig {
    pub n_tilde_m2_per_w: f64,
    pub n0: f64,
    pub beam_area_m2: f64,
    pub pulse_duration_s: f64,
    pub omega_rad_per_s: f64,
    pub photon_number: f64,
    /// Pulses per second for the average-power estimate.
    pub repetition_rate_hz: f64,
    /// Reported single-photon nonlinear phase range, rad.
    pub single_photon_phase_rad: [f64; 2],
    pub fibre_length_m: f64,
    /// Index entering the fibre transit time n·L/c.
    pub fibre_index: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        FeasibilityConfig {
            n_tilde_m2_per_w: 2.6e-20,
            n0: 1.45,
            beam_area_m2: 1e-12,
            pulse_duration_s: 30e-15,
            omega_rad_per_s: 1e14,
            photon_number: 1e20,
            repetition_rate_hz: 1e10,
            single_photon_phase_rad: [1e-8, 1e-7],
            fibre_length_m: 4.5,
            fibre_index: 1.0,
        }
    }
}

impl Config {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.probe()?;
        self.geometry()?;
        self.plan().validate()?;
        self.sweep_spec()?.validate()?;
        if self.probe.tau_s < 0.0 || !self.probe.tau_s.is_finite() {
            return Err(Error::invalid("tau_s", "must be finite and >= 0"));
        }
        self.feasibility_input().validate()
    }

    pub fn probe(&self) -> Result<Probe> {
        let p = &self.probe;
        let probe = match p.kerr_variant {
            KerrVariant::ShiftedQuadratic => {
                Probe::new(p.photon_number, p.omega_rad_per_s, p.chi_per_s)
            }
            KerrVariant::Monomial => {
                Probe::monomial(p.photon_number, p.omega_rad_per_s, p.chi_per_s, p.q)
            }
        };
        if !(p.photon_number >= 0.0) {
            return Err(Error::invalid("photon_number", "must be >= 0"));
        }
        probe.validate()?;
        Ok(probe)
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let g = &self.geometry;
        Geometry::new(g.r_s_m, g.r_a_m, g.h_m, g.arm_length_m, g.n_prime)
    }

    /// Plan with θ and β as configured, zero where absent.
    pub fn plan(&self) -> MeasurementPlan {
        let p = &self.plan;
        MeasurementPlan::lossless(p.repetitions)
            .with_losses(p.eps_a, p.eps_b)
            .with_settings(p.theta_rad.unwrap_or(0.0), p.beta_rad.unwrap_or(0.0))
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = &self.sweep;
        Ok(SweepSpec {
            n_decade_min: s.n_decade_min,
            n_decade_max: s.n_decade_max,
            points_per_decade: s.points_per_decade,
            chis: s.chi_per_s.clone(),
            omega: self.probe.omega_rad_per_s,
            variant: self.probe.kerr_variant,
            q: self.probe.q,
            geometry: self.geometry()?,
            plan: self.plan(),
            methods: s.methods.clone(),
            validity_threshold: s.validity_threshold,
            squeezed_eps: s.squeezed_eps,
            output: s.output_csv.clone(),
        })
    }

    pub fn feasibility_input(&self) -> FeasibilityInput {
        let f = &self.feasibility;
        FeasibilityInput {
            n_tilde: f.n_tilde_m2_per_w,
            n0: f.n0,
            area: f.beam_area_m2,
            dt: f.pulse_duration_s,
            omega: f.omega_rad_per_s,
            photon_number: f.photon_number,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_desk_scale_defaults() {
        let cfg = Config::from_json_str("{}").unwrap();
        let g = cfg.geometry().unwrap();
        assert_eq!(
            (g.arm_length, g.h, g.r_a, g.n_prime),
            (0.01, 10.0, 6.37e6, 1.0)
        );
        assert_eq!(cfg.plan.repetitions, 10_000_000_000);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = Config::from_json_str(r#"{"probe": {"omega": 1.0}}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(Config::from_json_str(r#"{"extra": {}}"#).is_err());
    }

    #[test]
    fn repetitions_accept_integral_floats_only() {
        let cfg = Config::from_json_str(r#"{"plan": {"repetitions": 1e10}}"#).unwrap();
        assert_eq!(cfg.plan.repetitions, 10_000_000_000);
        assert!(Config::from_json_str(r#"{"plan": {"repetitions": 2.5}}"#).is_err());
        assert!(Config::from_json_str(r#"{"plan": {"repetitions": 0}}"#).is_err());
    }

    #[test]
    fn validation_errors_surface() {
        assert!(matches!(
            Config::from_json_str(r#"{"geometry": {"r_a_m": 1e-3}}"#),
            Err(Error::Horizon { .. })
        ));
        assert!(Config::from_json_str(r#"{"sweep": {"chi_per_s": [-1.0]}}"#).is_err());
        assert!(Config::from_json_str(r#"{"plan": {"eps_a": 1.5}}"#).is_err());
        assert!(Config::from_json_str(r#"{"feasibility": {"beam_area_m2": 0}}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = Config::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(Config::from_json_str(&text).unwrap(), cfg);
    }
}
