//! Closed-form fidelity expansion, quantum Fisher information and Cramér-Rao
//! bounds on τ and on the Schwarzschild radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::{KerrVariant, Probe};
use crate::schwarzschild::{dtau2_drs, Geometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiSource {
    AnalyticKerr,
    AnalyticQ,
    Numeric,
}

/// QFI with respect to τ, in 1/s².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    pub source: QfiSource,
    /// Set when the value comes from the large-amplitude linearization.
    pub asymptotic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Fisher,
    FisherQ,
    Quadrature,
    Sql,
    SqueezedLossy,
}

impl BoundMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::Fisher => "fisher",
            BoundMethod::FisherQ => "fisher_q",
            BoundMethod::Quadrature => "quadrature",
            BoundMethod::Sql => "sql",
            BoundMethod::SqueezedLossy => "squeezed_lossy",
        }
    }
}

/// Parameters a bound was evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInputs {
    pub photon_number: f64,
    pub omega: f64,
    pub chi: f64,
    pub q: u32,
    pub variant: KerrVariant,
    pub geometry: Geometry,
    pub repetitions: u64,
    pub eps_a: f64,
    pub eps_b: f64,
    /// Squeezed photons and squeeze parameter, for the squeezed baseline only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeezed: Option<(f64, f64)>,
    pub notes: Vec<String>,
}

impl BoundInputs {
    pub fn new(probe: &Probe, geometry: &Geometry, repetitions: u64) -> Self {
        BoundInputs {
            photon_number: probe.photon_number(),
            omega: probe.omega,
            chi: probe.chi,
            q: probe.q,
            variant: probe.variant,
            geometry: *geometry,
            repetitions,
            eps_a: 1.0,
            eps_b: 1.0,
            squeezed: None,
            notes: vec![format!(
                "dilation gradient h/(2 r_A r_B) = {:.6e} 1/m stands in for K/(2 r0)",
                geometry.dilation_gradient()
            )],
        }
    }
}

/// Relative error Δr_s / r_s of one estimation strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub relative_error: f64,
    pub method: BoundMethod,
    pub inputs: BoundInputs,
}

fn require_shifted(probe: &Probe) -> Result<()> {
    if probe.variant != KerrVariant::ShiftedQuadratic {
        return Err(Error::invalid(
            "variant",
            "this formula needs the n(n+1) Kerr phase",
        ));
    }
    Ok(())
}

/// Coefficient of dτ² in 1 − F: N(2(2 + 5N + 2N²)χ² + 4(1 + N)χω + ω²).
pub fn fidelity_curvature(probe: &Probe) -> f64 {
    let n = probe.photon_number();
    let (chi, omega) = (probe.chi, probe.omega);
    n * (2.0 * (2.0 + 5.0 * n + 2.0 * n * n) * chi * chi
        + 4.0 * (1.0 + n) * chi * omega
        + omega * omega)
}

/// 1 − F to second order in dτ.
pub fn infidelity_second_order(probe: &Probe, dtau: f64) -> Result<f64> {
    require_shifted(probe)?;
    Ok(dtau * dtau * fidelity_curvature(probe))
}

/// Fidelity between the Kerr-evolved probe at τ and τ + dτ, to second order in dτ.
pub fn fidelity_second_order(probe: &Probe, dtau: f64) -> Result<f64> {
    Ok(1.0 - infidelity_second_order(probe, dtau)?)
}

/// Whether |dτ|·√H stays below 0.1, where the second-order expansion is trustworthy.
pub fn is_small_step(probe: &Probe, dtau: f64) -> bool {
    dtau.abs() * (4.0 * fidelity_curvature(probe)).sqrt() < 0.1
}

/// 8(1 − √F)/dτ², evaluated from the infidelity 1 − F as 8x/((1 + √(1−x)) dτ²).
pub fn qfi_from_infidelity(infidelity: f64, dtau: f64) -> f64 {
    8.0 * infidelity / ((1.0 + (1.0 - infidelity).sqrt()) * dtau * dtau)
}

/// H(τ) = 4N((ω + 2(N+1)χ)² + 2Nχ²) for the n(n+1) Kerr phase.
pub fn qfi_kerr(probe: &Probe) -> Result<QfiResult> {
    require_shifted(probe)?;
    let n = probe.photon_number();
    let (chi, omega) = (probe.chi, probe.omega);
    let lead = omega + 2.0 * (n + 1.0) * chi;
    Ok(QfiResult {
        value: 4.0 * n * (lead * lead + 2.0 * n * chi * chi),
        source: QfiSource::AnalyticKerr,
        asymptotic: false,
    })
}

/// H(τ) = 4N(qχN^{q−1} + ω)² for χ(a†a)^q, valid for large amplitude.
pub fn qfi_general_q(probe: &Probe) -> Result<QfiResult> {
    if probe.variant != KerrVariant::Monomial {
        return Err(Error::invalid(
            "variant",
            "this formula needs the n^q Kerr phase",
        ));
    }
    probe.validate()?;
    let n = probe.photon_number();
    let q = probe.q as f64;
    let rate = q * probe.chi * n.powi(probe.q as i32 - 1) + probe.omega;
    Ok(QfiResult {
        value: 4.0 * n * rate * rate,
        source: QfiSource::AnalyticQ,
        asymptotic: true,
    })
}

/// Standard deviation bound 1/√(M H) on τ.
pub fn cr_bound_tau(qfi: &QfiResult, repetitions: u64) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::invalid("repetitions", "M must be >= 1"));
    }
    if !(qfi.value > 0.0) {
        return Err(Error::UnboundedVariance);
    }
    Ok(1.0 / (repetitions as f64 * qfi.value).sqrt())
}

/// Δr_s/r_s = Δτ / (|dτ₂/dr_s| r_s).
fn relative_from_tau(tau_bound: f64, geometry: &Geometry) -> Result<f64> {
    if geometry.r_s == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    let slope = dtau2_drs(geometry)?.abs();
    if slope == 0.0 {
        return Err(Error::invalid(
            "h",
            "zero arm separation carries no information about r_s",
        ));
    }
    Ok(tau_bound / (slope * geometry.r_s))
}

/// Fisher bound r_A r_B c / (L h r_s √(M N((ω + 2(N+1)χ)² + 2Nχ²))).
pub fn cr_bound_rs(probe: &Probe, geometry: &Geometry, repetitions: u64) -> Result<BoundResult> {
    probe.validate()?;
    let qfi = qfi_kerr(probe)?;
    let tau_bound = cr_bound_tau(&qfi, repetitions)?;
    Ok(BoundResult {
        relative_error: relative_from_tau(tau_bound, geometry)?,
        method: BoundMethod::Fisher,
        inputs: BoundInputs::new(probe, geometry, repetitions),
    })
}

/// Order-q Fisher bound r_A r_B c / (L h r_s √(M N(qχN^{q−1} + ω)²)).
pub fn cr_bound_rs_general_q(
    probe: &Probe,
    geometry: &Geometry,
    repetitions: u64,
) -> Result<BoundResult> {
    let qfi = qfi_general_q(probe)?;
    let tau_bound = cr_bound_tau(&qfi, repetitions)?;
    let mut inputs = BoundInputs::new(probe, geometry, repetitions);
    inputs
        .notes
        .push("asymptotic: large-amplitude linearization of the order-q phase".into());
    Ok(BoundResult {
        relative_error: relative_from_tau(tau_bound, geometry)?,
        method: BoundMethod::FisherQ,
        inputs,
    })
}
