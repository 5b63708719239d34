//! Proper times of the two horizontal arms in the Schwarzschild field.
//!
//! The lower arm sits at `r_A`, the upper at `r_B = r_A + h`. With the lower-arm
//! transit fixed at τ₁ = L/c, the upper arm is modeled with τ₂ = (1 − δ)τ₁ to
//! first order, δ = r_s h / (2 r_A r_B). The closed form used for the exact
//! ratio is √((1 − r_s/r_A)/(1 − r_s/r_B)), the expression whose expansion is
//! 1 − δ. Small differences such as 1 − τ₂/τ₁ are computed directly rather than
//! by subtracting nearly equal numbers, because δ is ~1e-15 at Earth scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Earth radius used for the desk-scale examples, m.
pub const EARTH_RADIUS: f64 = 6.37e6;
/// Earth Schwarzschild radius 2GM/c², m.
pub const EARTH_SCHWARZSCHILD_RADIUS: f64 = 8.87e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Schwarzschild radius, m.
    pub r_s: f64,
    /// Lower-arm radius, m.
    pub r_a: f64,
    /// Arm separation, m. The upper arm sits at r_A + h.
    pub h: f64,
    /// Horizontal arm length L, m.
    pub arm_length: f64,
    /// First-order refractive index n′.
    pub n_prime: f64,
}

impl Geometry {
    pub fn new(r_s: f64, r_a: f64, h: f64, arm_length: f64, n_prime: f64) -> Result<Self> {
        let g = Geometry {
            r_s,
            r_a,
            h,
            arm_length,
            n_prime,
        };
        g.validate()?;
        Ok(g)
    }

    /// Earth-surface interferometer of height `h` and arm length `arm_length`, n′ = 1.
    pub fn earth(h: f64, arm_length: f64) -> Self {
        Geometry {
            r_s: EARTH_SCHWARZSCHILD_RADIUS,
            r_a: EARTH_RADIUS,
            h,
            arm_length,
            n_prime: 1.0,
        }
    }

    #[inline]
    pub fn r_b(&self) -> f64 {
        self.r_a + self.h
    }

    /// δ = r_s h / (2 r_A r_B).
    #[inline]
    pub fn delta(&self) -> f64 {
        self.r_s * self.dilation_gradient()
    }

    /// δ/r_s = h / (2 r_A r_B), the combination K/(2r₀) used by every r_s bound.
    #[inline]
    pub fn dilation_gradient(&self) -> f64 {
        self.h / (2.0 * self.r_a * self.r_b())
    }

    /// Lower-arm transit time L/c, s.
    #[inline]
    pub fn tau1(&self) -> f64 {
        self.arm_length / SPEED_OF_LIGHT
    }

    /// Same geometry with a different Schwarzschild radius.
    pub fn with_r_s(&self, r_s: f64) -> Self {
        Geometry { r_s, ..*self }
    }

    pub fn with_h(&self, h: f64) -> Self {
        Geometry { h, ..*self }
    }

    /// `h = 0` is accepted as the degenerate, dilation-free case.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_s, self.r_a, self.h, self.arm_length, self.n_prime]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("geometry", "all lengths must be finite"));
        }
        if self.r_s < 0.0 {
            return Err(Error::invalid("r_s", format!("{} must be >= 0", self.r_s)));
        }
        if self.r_a <= self.r_s {
            return Err(Error::Horizon {
                r_s: self.r_s,
                r_a: self.r_a,
            });
        }
        if self.h < 0.0 {
            return Err(Error::invalid("h", format!("{} must be >= 0", self.h)));
        }
        if self.arm_length <= 0.0 {
            return Err(Error::invalid(
                "arm_length",
                format!("{} must be > 0", self.arm_length),
            ));
        }
        if self.n_prime < 1.0 {
            return Err(Error::invalid(
                "n_prime",
                format!("{} must be >= 1", self.n_prime),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    Exact,
    FirstOrder,
}

/// 1 − τ₂/τ₁ without cancellation.
pub fn dilation_deficit(geometry: &Geometry, mode: TimeMode) -> Result<f64> {
    geometry.validate()?;
    Ok(match mode {
        TimeMode::FirstOrder => geometry.delta(),
        TimeMode::Exact => {
            // ratio² = 1 − w
            let w = geometry.r_s * geometry.h / (geometry.r_a * (geometry.r_b() - geometry.r_s));
            w / (1.0 + (1.0 - w).sqrt())
        }
    })
}

/// τ₂/τ₁: exact √((1 − r_s/r_A)/(1 − r_s/r_B)) or first-order 1 − δ.
pub fn proper_time_ratio(geometry: &Geometry, mode: TimeMode) -> Result<f64> {
    Ok(1.0 - dilation_deficit(geometry, mode)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmTimes {
    /// Lower arm, s.
    pub tau1: f64,
    /// Upper arm, s.
    pub tau2: f64,
    pub delta: f64,
    /// τ₁ − τ₂, s, carried separately since it is far below the precision of τ₂.
    pub deficit: f64,
}

impl ArmTimes {
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.tau2 / self.tau1
    }
}

pub fn arm_proper_times(geometry: &Geometry) -> Result<ArmTimes> {
    let tau1 = geometry.tau1();
    let deficit = tau1 * dilation_deficit(geometry, TimeMode::Exact)?;
    Ok(ArmTimes {
        tau1,
        tau2: tau1 - deficit,
        delta: geometry.delta(),
        deficit,
    })
}

/// Upper-arm linear phase φ₂₄ in metres (multiply by k for radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearPhase {
    pub exact: f64,
    pub first_order: f64,
}

/// φ₂₄ = (1 − (τ₂/τ₁)/n′) L, exact and to first order (1 − 1/n′ + δ/n′) L.
pub fn linear_phase_phi24(geometry: &Geometry) -> Result<LinearPhase> {
    let n = geometry.n_prime;
    let l = geometry.arm_length;
    let base = 1.0 - 1.0 / n;
    let exact = (base + dilation_deficit(geometry, TimeMode::Exact)? / n) * l;
    let first_order = (base + geometry.delta() / n) * l;
    Ok(LinearPhase { exact, first_order })
}

/// dτ₂/dr_s = −(δ/r_s)(L/c), s/m. Finite at r_s = 0.
pub fn dtau2_drs(geometry: &Geometry) -> Result<f64> {
    geometry.validate()?;
    Ok(-geometry.dilation_gradient() * geometry.tau1())
}
