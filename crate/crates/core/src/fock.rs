//! Truncated number-basis representation of coherent probes under Kerr evolution.
//!
//! Everything here is exact up to the truncation of the Fock basis, which makes
//! the module the brute-force reference for the closed forms in [`crate::analytic`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::probe::Probe;

/// Default bound on the squared norm lost to truncation.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Pure state on the photon-number basis `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid(
                "amplitudes",
                "at least the vacuum amplitude is required",
            ));
        }
        Ok(FockState { amplitudes })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        FockState { amplitudes }
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }
}

/// ln(n!) without overflow.
///
/// Direct product below 171 (where n! is still a finite f64), Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 170 {
        let mut p = 1.0f64;
        for k in 2..=n {
            p *= k as f64;
        }
        return p.ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// ln |⟨n|α⟩| for a coherent state of mean photon number `n_a`.
fn ln_coherent_modulus(n_a: f64, n: usize) -> f64 {
    if n == 0 {
        return -0.5 * n_a;
    }
    // n_a > 0 here, otherwise every n >= 1 amplitude is exactly zero
    -0.5 * n_a + 0.5 * n as f64 * n_a.ln() - 0.5 * ln_factorial(n)
}

fn truncated_poisson_mass(n_a: f64, cutoff: usize) -> f64 {
    if n_a == 0.0 {
        return 1.0;
    }
    (0..=cutoff)
        .map(|n| (2.0 * ln_coherent_modulus(n_a, n)).exp())
        .sum()
}

/// Coherent state truncated at `cutoff`, rejecting truncations that lose more
/// than [`DEFAULT_TRUNCATION_TOL`] of the norm.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    coherent_state_with_tol(alpha, cutoff, DEFAULT_TRUNCATION_TOL)
}

/// Coherent state e^{-|α|²/2} Σ αⁿ/√n! |n⟩ truncated at `cutoff`.
///
/// Amplitudes are built in the log domain, so large photon numbers neither
/// overflow n! nor underflow e^{-|α|²/2}. The state is not renormalized.
pub fn coherent_state_with_tol(alpha: Complex64, cutoff: usize, tol: f64) -> Result<FockState> {
    let n_a = alpha.norm_sqr();
    let arg = alpha.arg();
    let mut amplitudes = Vec::with_capacity(cutoff + 1);
    for n in 0..=cutoff {
        let modulus = if n_a == 0.0 {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            ln_coherent_modulus(n_a, n).exp()
        };
        amplitudes.push(Complex64::from_polar(modulus, n as f64 * arg));
    }
    let state = FockState { amplitudes };
    let norm = state.norm_sqr();
    if norm < 1.0 - tol {
        return Err(Error::Truncation {
            cutoff,
            norm,
            required: 1.0 - tol,
        });
    }
    Ok(state)
}

/// Smallest cutoff ⌈N + c√(N+1)⌉, c = 10, 11, ..., whose truncated coherent
/// norm reaches `1 - tol`.
pub fn default_cutoff(n_a: f64, tol: f64) -> usize {
    let n_a = n_a.max(0.0);
    let mut c = 10.0;
    loop {
        let cutoff = (n_a + c * (n_a + 1.0).sqrt()).ceil() as usize;
        if truncated_poisson_mass(n_a, cutoff) >= 1.0 - tol {
            return cutoff;
        }
        c += 1.0;
    }
}

/// Applies exp(i χτ f(n̂) + i n̂ωτ) with f(n) = n(n+1) or n^q.
pub fn kerr_evolve(state: &FockState, probe: &Probe, tau: f64) -> FockState {
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let phase = probe.chi * tau * probe.kerr_exponent(n) + n as f64 * probe.omega * tau;
            c * Complex64::from_polar(1.0, phase)
        })
        .collect();
    FockState { amplitudes }
}

/// ⟨a|b⟩. The shorter state is treated as zero-padded.
pub fn overlap(a: &FockState, b: &FockState) -> Complex64 {
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Pure-state fidelity |⟨a|b⟩|².
pub fn fidelity(a: &FockState, b: &FockState) -> f64 {
    overlap(a, b).norm_sqr()
}

/// Step selection for the fidelity finite difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    /// Target for H·dτ², kept inside [1e-8, 1e-4].
    pub target: f64,
    /// Allowed relative gap between the refined and extrapolated estimates.
    pub rtol: f64,
    pub truncation_tol: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            target: 1e-5,
            rtol: 1e-4,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        }
    }
}

/// Numerical QFI together with the estimates it was extrapolated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericQfi {
    pub value: f64,
    /// 8(1-√F)/dτ² at the chosen step.
    pub coarse: f64,
    /// Same at dτ/2.
    pub refined: f64,
    pub dtau: f64,
    pub cutoff: usize,
}

/// QFI with respect to τ from 8(1-√F(τ, τ+dτ))/dτ² on the truncated Fock state.
///
/// A pilot step sized so no generator phase exceeds 0.01 rad gives a first
/// estimate H₀; the working step is then dτ = √(target/H₀). The estimates at dτ
/// and dτ/2 are Richardson-combined, which removes the dτ² term (the fidelity
/// is even in dτ).
pub fn numeric_qfi(probe: &Probe, tau: f64, policy: StepPolicy) -> Result<NumericQfi> {
    probe.validate()?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid(
            "tau",
            format!("{tau} must be finite and >= 0"),
        ));
    }
    if !(1e-8..=1e-4).contains(&policy.target) {
        return Err(Error::invalid(
            "target",
            "H*dtau^2 target must lie in [1e-8, 1e-4]",
        ));
    }
    let n_a = probe.photon_number();
    let cutoff = default_cutoff(n_a, policy.truncation_tol);
    let initial = coherent_state_with_tol(probe.alpha, cutoff, policy.truncation_tol)?;
    let norm = initial.norm_sqr();
    let at_tau = kerr_evolve(&initial, probe, tau);

    let estimate = |dtau: f64| {
        let moved = kerr_evolve(&initial, probe, tau + dtau);
        let root_fidelity = overlap(&at_tau, &moved).norm() / norm;
        8.0 * (1.0 - root_fidelity) / (dtau * dtau)
    };

    let zero = NumericQfi {
        value: 0.0,
        coarse: 0.0,
        refined: 0.0,
        dtau: 0.0,
        cutoff,
    };
    let spread = probe.chi * probe.kerr_exponent(cutoff) + probe.omega * cutoff as f64;
    if n_a == 0.0 || spread == 0.0 {
        return Ok(zero);
    }
    let pilot = estimate(1e-2 / spread);
    if pilot <= 0.0 {
        return Ok(zero);
    }
    let dtau = (policy.target / pilot).sqrt();
    let coarse = estimate(dtau);
    let refined = estimate(0.5 * dtau);
    let extrapolated = (4.0 * refined - coarse) / 3.0;
    if !((extrapolated - refined).abs() <= policy.rtol * extrapolated.abs()) {
        return Err(Error::NonConvergence { coarse, refined });
    }
    Ok(NumericQfi {
        value: extrapolated.max(0.0),
        coarse,
        refined,
        dtau,
        cutoff,
    })
}
