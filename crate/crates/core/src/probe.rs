use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon-number dependence of the Kerr phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KerrVariant {
    /// Phase χτ·n(n+1).
    #[default]
    ShiftedQuadratic,
    /// Phase χτ·n^q.
    Monomial,
}

/// Single-mode coherent optical probe.
///
/// The mean photon number is always derived from the amplitude, so
/// `photon_number() == alpha.norm_sqr()` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub alpha: Complex64,
    /// Angular frequency ω = kc, rad/s.
    pub omega: f64,
    /// Kerr strength χ, rad/s.
    pub chi: f64,
    /// Nonlinearity order, only read by the monomial variant.
    pub q: u32,
    pub variant: KerrVariant,
}

impl Probe {
    /// Shifted-quadratic probe with a real amplitude √N.
    pub fn new(photon_number: f64, omega: f64, chi: f64) -> Self {
        Probe {
            alpha: Complex64::new(photon_number.max(0.0).sqrt(), 0.0),
            omega,
            chi,
            q: 2,
            variant: KerrVariant::ShiftedQuadratic,
        }
    }

    /// Monomial χ(a†a)^q probe with a real amplitude √N.
    pub fn monomial(photon_number: f64, omega: f64, chi: f64, q: u32) -> Self {
        Probe {
            q,
            variant: KerrVariant::Monomial,
            ..Probe::new(photon_number, omega, chi)
        }
    }

    pub fn with_alpha(alpha: Complex64, omega: f64, chi: f64) -> Self {
        Probe {
            alpha,
            ..Probe::new(0.0, omega, chi)
        }
    }

    #[inline]
    pub fn photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// The probe after a beamsplitter of transmission `eps` (amplitude scaled by √eps).
    pub fn attenuated(&self, eps: f64) -> Self {
        Probe {
            alpha: self.alpha * eps.sqrt(),
            ..*self
        }
    }

    pub fn with_chi(&self, chi: f64) -> Self {
        Probe { chi, ..*self }
    }

    pub fn with_photon_number(&self, photon_number: f64) -> Self {
        let phase = if self.alpha == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            self.alpha.arg()
        };
        Probe {
            alpha: Complex64::from_polar(photon_number.max(0.0).sqrt(), phase),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::invalid("alpha", "amplitude must be finite"));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid(
                "omega",
                format!("{} must be finite and >= 0", self.omega),
            ));
        }
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::invalid(
                "chi",
                format!("{} must be finite and >= 0", self.chi),
            ));
        }
        if self.q < 2 {
            return Err(Error::invalid(
                "q",
                format!("order {} must be >= 2", self.q),
            ));
        }
        Ok(())
    }

    /// Kerr exponent f(n): n(n+1) or n^q.
    #[inline]
    pub fn kerr_exponent(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.variant {
            KerrVariant::ShiftedQuadratic => n * (n + 1.0),
            KerrVariant::Monomial => n.powi(self.q as i32),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_number_is_amplitude_squared() {
        let p = Probe::with_alpha(Complex64::new(1.5, -2.0), 1.0, 0.1);
        assert_eq!(p.photon_number(), 1.5 * 1.5 + 2.0 * 2.0);
    }

    #[test]
    fn attenuation_scales_photon_number() {
        let p = Probe::new(1e6, 1.0, 0.1).attenuated(0.25);
        assert!((p.photon_number() - 2.5e5).abs() < 1e-6);
    }

    #[test]
    fn order_below_two_rejected() {
        let p = Probe::monomial(1.0, 1.0, 1.0, 1);
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "q", .. })
        ));
    }

    #[test]
    fn exponents() {
        let quad = Probe::new(1.0, 0.0, 1.0);
        let cubic = Probe::monomial(1.0, 0.0, 1.0, 3);
        assert_eq!(quad.kerr_exponent(3), 12.0);
        assert_eq!(cubic.kerr_exponent(3), 27.0);
    }
}
