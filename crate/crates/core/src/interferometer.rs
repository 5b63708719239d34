//! Linearized homodyne model of the nonlinear Mach-Zehnder output.
//!
//! Conventions:
//! - vacuum quadrature variance is 1, so penalties in dB are 10·log₁₀(V);
//! - φ₁ = 0, so ζ₁ = −τ₁χN and ζ₂ = kφ₂ − τ₂χN;
//! - insertion loss ε_b scales the photon number before the Kerr media, detection
//!   loss ε_a scales the output amplitude;
//! - the output noise bookkeeping uses the main-text variance
//!   ε_a A² − ε_a A B + 1, which gives exactly 1 at χ = 0.
//!
//! The two arm angles θ + ζ₂ and θ + ζ₁ + β are formed as (θ + ζ₁) + β_dark and
//! (θ + ζ₁) + β, and their sines and cosines are differenced with sum-to-product
//! identities. ζ₁ does not depend on r_s, so the r_s dependence lives entirely
//! in β_dark, which is computed without cancellation.

use std::f64::consts::FRAC_PI_2;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::{BoundInputs, BoundMethod, BoundResult};
use crate::error::{Error, Result};
use crate::probe::Probe;
use crate::schwarzschild::{arm_proper_times, dilation_deficit, ArmTimes, Geometry, TimeMode};
use crate::stats::mean_std;
use crate::SPEED_OF_LIGHT;

/// χτ√N above which the linearized treatment is rejected.
pub const LINEARIZATION_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    /// Homodyne angle θ, rad.
    pub theta: f64,
    /// Auxiliary linear phase β, rad.
    pub beta: f64,
    pub repetitions: u64,
    /// Transmission after the nonlinearity (detection efficiency).
    pub eps_a: f64,
    /// Transmission before the nonlinearity (insertion loss).
    pub eps_b: f64,
}

impl MeasurementPlan {
    pub fn lossless(repetitions: u64) -> Self {
        MeasurementPlan {
            theta: 0.0,
            beta: 0.0,
            repetitions,
            eps_a: 1.0,
            eps_b: 1.0,
        }
    }

    pub fn with_losses(self, eps_a: f64, eps_b: f64) -> Self {
        MeasurementPlan {
            eps_a,
            eps_b,
            ..self
        }
    }

    pub fn with_settings(self, theta: f64, beta: f64) -> Self {
        MeasurementPlan {
            theta,
            beta,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", "M must be >= 1"));
        }
        for (name, eps) in [("eps_a", self.eps_a), ("eps_b", self.eps_b)] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::invalid(
                    name,
                    format!("transmission {eps} outside [0, 1]"),
                ));
            }
        }
        if !(self.theta.is_finite() && self.beta.is_finite()) {
            return Err(Error::invalid("theta/beta", "angles must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedPhases {
    pub zeta1: f64,
    pub zeta2: f64,
    /// ζ₂ − ζ₁, computed directly.
    pub beta_dark: f64,
    /// Lower-arm linear phase, m (zero by convention).
    pub phi1: f64,
    /// Upper-arm linear phase φ₂₄, m.
    pub phi2: f64,
}

/// χτ₁√N with τ₁ = L/c.
pub fn validity_metric(probe: &Probe, geometry: &Geometry) -> f64 {
    probe.chi * geometry.tau1() * probe.photon_number().sqrt()
}

/// ζ₁, ζ₂ and the dark-port phase, rejecting probes outside the linearized regime.
pub fn derived_phases(probe: &Probe, geometry: &Geometry) -> Result<DerivedPhases> {
    let metric = validity_metric(probe, geometry);
    if !(metric <= LINEARIZATION_THRESHOLD) {
        return Err(Error::Linearization {
            metric,
            threshold: LINEARIZATION_THRESHOLD,
        });
    }
    derived_phases_unchecked(probe, geometry)
}

/// [`derived_phases`] without the linearization check.
pub fn derived_phases_unchecked(probe: &Probe, geometry: &Geometry) -> Result<DerivedPhases> {
    probe.validate()?;
    let deficit = dilation_deficit(geometry, TimeMode::Exact)?;
    let tau1 = geometry.tau1();
    let n = probe.photon_number();
    let n_prime = geometry.n_prime;

    // kφ₂ = ωτ₁(1 − 1/n′ + d/n′) and τ₂ = τ₁(1 − d), d = 1 − τ₂/τ₁
    let phi2 = geometry.arm_length * ((1.0 - 1.0 / n_prime) + deficit / n_prime);
    let zeta1 = -tau1 * probe.chi * n;
    let beta_dark = probe.omega * tau1 * ((1.0 - 1.0 / n_prime) + deficit / n_prime)
        + tau1 * probe.chi * n * deficit;
    Ok(DerivedPhases {
        zeta1,
        zeta2: zeta1 + beta_dark,
        beta_dark,
        phi1: 0.0,
        phi2,
    })
}

/// Half-sum and half-difference of the arm angles a₂ = θ + ζ₂ and a₁ = θ + ζ₁ + β.
fn half_angles(plan: &MeasurementPlan, phases: &DerivedPhases) -> (f64, f64, f64) {
    let base = plan.theta + phases.zeta1;
    let half_sum = base + 0.5 * (phases.beta_dark + plan.beta);
    let half_diff = 0.5 * (phases.beta_dark - plan.beta);
    (base + phases.beta_dark, half_sum, half_diff)
}

/// cos a₂ − cos a₁.
fn cos_difference(plan: &MeasurementPlan, phases: &DerivedPhases) -> f64 {
    let (_, half_sum, half_diff) = half_angles(plan, phases);
    -2.0 * half_sum.sin() * half_diff.sin()
}

/// τ₂ sin a₂ − τ₁ sin a₁.
fn weighted_sin_difference(
    plan: &MeasurementPlan,
    phases: &DerivedPhases,
    times: &ArmTimes,
) -> f64 {
    let (a2, half_sum, half_diff) = half_angles(plan, phases);
    times.tau1 * 2.0 * half_sum.cos() * half_diff.sin() - times.deficit * a2.sin()
}

/// ⟨X_b⟩ = √ε_a √(ε_b N) (cos(θ + ζ₂) − cos(θ + ζ₁ + β)).
///
/// `phases` must be derived from the probe after insertion loss.
pub fn mean_quadrature(plan: &MeasurementPlan, probe: &Probe, phases: &DerivedPhases) -> f64 {
    let amplitude = (plan.eps_a * plan.eps_b * probe.photon_number()).sqrt();
    amplitude * cos_difference(plan, phases)
}

/// Smallest variance returned; the expression itself is ≥ 0.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// ⟨ΔX_b²⟩ = ε_a A² − ε_a A B + 1 with A = χε_bN(τ₂ sin a₂ − τ₁ sin a₁) and
/// B = cos a₂ − cos a₁.
pub fn quadrature_variance(
    plan: &MeasurementPlan,
    probe: &Probe,
    phases: &DerivedPhases,
    times: &ArmTimes,
) -> f64 {
    let a = probe.chi
        * plan.eps_b
        * probe.photon_number()
        * weighted_sin_difference(plan, phases, times);
    let b = cos_difference(plan, phases);
    (plan.eps_a * a * a - plan.eps_a * a * b + 1.0).max(VARIANCE_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalSettings {
    pub theta: f64,
    pub beta: f64,
    /// sin(θ + ζ₂)/sin(θ + ζ₁ + β) − τ₁/τ₂ at the returned angles.
    pub residual: f64,
}

/// θ* = π/2 − ζ₂ and β* = ζ₂ − ζ₁ − π/2 + arcsin(τ₂/τ₁).
///
/// π/2 − arcsin(1 − d) is evaluated as 2 arcsin(√(d/2)), d = 1 − τ₂/τ₁.
pub fn optimal_settings(
    probe: &Probe,
    phases: &DerivedPhases,
    times: &ArmTimes,
) -> Result<OptimalSettings> {
    let _ = probe;
    let d = times.deficit / times.tau1;
    if !(0.0..1.0).contains(&d) {
        return Err(Error::Domain(1.0 - d));
    }
    let theta = FRAC_PI_2 - phases.zeta2;
    let beta = phases.beta_dark - 2.0 * (0.5 * d).sqrt().asin();
    let plan = MeasurementPlan::lossless(1).with_settings(theta, beta);
    let (a2, half_sum, half_diff) = half_angles(&plan, phases);
    let a1 = half_sum - half_diff;
    let residual = a2.sin() / a1.sin() - times.tau1 / times.tau2;
    Ok(OptimalSettings {
        theta,
        beta,
        residual,
    })
}

/// Plan at the optimal angles for the probe after insertion loss.
pub fn optimal_plan(
    probe: &Probe,
    geometry: &Geometry,
    plan: &MeasurementPlan,
) -> Result<(MeasurementPlan, DerivedPhases, ArmTimes)> {
    plan.validate()?;
    let effective = probe.attenuated(plan.eps_b);
    let phases = derived_phases(&effective, geometry)?;
    let times = arm_proper_times(geometry)?;
    let opt = optimal_settings(&effective, &phases, &times)?;
    Ok((plan.with_settings(opt.theta, opt.beta), phases, times))
}

/// Slope of the mean quadrature with respect to r_s at the optimal settings:
/// √ε_a √(ε_b N)(ω/n′ + ε_b N χ)(δL/(r_s c))(1 + τ₂/τ₁).
///
/// This is the slope behind the quadrature bound. At fixed (θ, β) only the upper
/// arm moves with r_s, and the slope of [`mean_quadrature`] itself is this value
/// divided by (1 + τ₂/τ₁).
pub fn mean_derivative_rs(
    probe: &Probe,
    geometry: &Geometry,
    plan: &MeasurementPlan,
) -> Result<f64> {
    probe.validate()?;
    plan.validate()?;
    let times = arm_proper_times(geometry)?;
    let n = plan.eps_b * probe.photon_number();
    let rate = probe.omega / geometry.n_prime + n * probe.chi;
    Ok(plan.eps_a.sqrt()
        * n.sqrt()
        * rate
        * geometry.dilation_gradient()
        * (geometry.arm_length / SPEED_OF_LIGHT)
        * (1.0 + times.ratio()))
}

/// Quadrature-measurement bound
/// r_A r_B c / (L h r_s (1 − δ) √(ε_a ε_b M N (ω/n′ + ε_b N χ)²)).
pub fn quadrature_bound_rs(
    probe: &Probe,
    geometry: &Geometry,
    plan: &MeasurementPlan,
) -> Result<BoundResult> {
    probe.validate()?;
    plan.validate()?;
    geometry.validate()?;
    if geometry.r_s == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    let n = probe.photon_number();
    let rate = probe.omega / geometry.n_prime + plan.eps_b * n * probe.chi;
    let information = plan.eps_a * plan.eps_b * plan.repetitions as f64 * n * rate * rate;
    let lever = geometry.arm_length * geometry.h * geometry.r_s * (1.0 - geometry.delta());
    if !(information > 0.0 && lever > 0.0) {
        return Err(Error::invalid(
            "quadrature bound",
            "zero photons, transmission, frequency or arm separation",
        ));
    }
    let mut inputs = BoundInputs::new(probe, geometry, plan.repetitions);
    inputs.eps_a = plan.eps_a;
    inputs.eps_b = plan.eps_b;
    inputs.notes.push(format!("n_prime = {}", geometry.n_prime));
    Ok(BoundResult {
        relative_error: geometry.r_a * geometry.r_b() * SPEED_OF_LIGHT
            / (lever * information.sqrt()),
        method: BoundMethod::Quadrature,
        inputs,
    })
}

/// Linear-interferometer shot-noise bound: the quadrature bound at χ = 0 without loss.
pub fn sql_bound_rs(probe: &Probe, geometry: &Geometry, repetitions: u64) -> Result<BoundResult> {
    let mut bound = quadrature_bound_rs(
        &probe.with_chi(0.0),
        geometry,
        &MeasurementPlan::lossless(repetitions),
    )?;
    bound.method = BoundMethod::Sql;
    Ok(bound)
}

/// Squeezed-coherent probe through a channel of transmission `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedProbe {
    pub n_c: f64,
    pub n_s: f64,
    pub r: f64,
    pub eps: f64,
}

impl SqueezedProbe {
    pub fn new(n_c: f64, n_s: f64, r: f64, eps: f64) -> Result<Self> {
        let sq = SqueezedProbe { n_c, n_s, r, eps };
        sq.validate()?;
        Ok(sq)
    }

    /// All `n_s` squeezed photons in squeezed vacuum: sinh² r = N_s.
    pub fn from_squeezed_photons(n_c: f64, n_s: f64, eps: f64) -> Result<Self> {
        SqueezedProbe::new(n_c, n_s, n_s.max(0.0).sqrt().asinh(), eps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_c >= 0.0 && self.n_s >= 0.0) {
            return Err(Error::invalid(
                "squeezed photons",
                "N_c and N_s must be >= 0",
            ));
        }
        if !(self.r >= 0.0) {
            return Err(Error::invalid("r", "squeeze parameter must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(Error::invalid(
                "eps",
                format!("transmission {} outside [0, 1]", self.eps),
            ));
        }
        Ok(())
    }

    /// εN_c/(1 − ε + εe^{−2r}) + εN_s.
    pub fn effective_photons(&self) -> f64 {
        let eps = self.eps;
        eps * self.n_c / ((1.0 - eps) + eps * (-2.0 * self.r).exp()) + eps * self.n_s
    }
}

/// Lossy squeezed-probe limit r_A r_B c n′ / (2 L h r_s ω √(M(εN_c/(1−ε+εe^{−2r}) + εN_s))).
pub fn squeezed_lossy_bound(
    sq: &SqueezedProbe,
    geometry: &Geometry,
    omega: f64,
    repetitions: u64,
) -> Result<BoundResult> {
    sq.validate()?;
    geometry.validate()?;
    if geometry.r_s == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    if repetitions == 0 {
        return Err(Error::invalid("repetitions", "M must be >= 1"));
    }
    let photons = sq.effective_photons();
    let lever = 2.0 * geometry.arm_length * geometry.h * geometry.r_s * omega;
    if !(photons > 0.0 && lever > 0.0) {
        return Err(Error::invalid(
            "squeezed bound",
            "zero photons, frequency or arm separation",
        ));
    }
    let coherent = Probe::new(sq.n_c, omega, 0.0);
    let mut inputs = BoundInputs::new(&coherent, geometry, repetitions);
    inputs.eps_a = sq.eps;
    inputs.squeezed = Some((sq.n_s, sq.r));
    Ok(BoundResult {
        relative_error: geometry.r_a * geometry.r_b() * SPEED_OF_LIGHT * geometry.n_prime
            / (lever * (repetitions as f64 * photons).sqrt()),
        method: BoundMethod::SqueezedLossy,
        inputs,
    })
}

/// Excess quadrature noise in dB at θ = θ*, β = β* + Δβ.
pub fn noise_penalty_db(probe: &Probe, geometry: &Geometry, delta_beta: f64) -> Result<f64> {
    let (plan, phases, times) = optimal_plan(probe, geometry, &MeasurementPlan::lossless(1))?;
    let shifted = plan.with_settings(plan.theta, plan.beta + delta_beta);
    Ok(10.0 * quadrature_variance(&shifted, probe, &phases, &times).log10())
}

/// Outcome of the seeded Monte-Carlo estimator check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStats {
    pub trials: usize,
    pub seed: u64,
    /// Sample standard deviation of (r̂_s − r_s)/r_s.
    pub std_relative: f64,
    /// Sample mean of (r̂_s − r_s)/r_s.
    pub bias_relative: f64,
    pub bias_standard_error: f64,
    pub mean_estimate: f64,
    /// Quadrature bound the spread should reproduce.
    pub predicted_relative: f64,
    pub variance: f64,
    pub slope: f64,
}

fn draw_standard_normal(seed: u64, trial: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    StandardNormal.sample(&mut rng)
}

/// Simulates `trials` experiments of `M` homodyne shots at the optimal
/// settings and inverts the linearized mean map for r̂_s.
///
/// Each trial draws the M-shot sample mean directly from N(⟨X_b⟩, ⟨ΔX_b²⟩/M).
/// Trial `t` uses ChaCha8 stream `t` under `seed`, so results do not depend on
/// evaluation order.
pub fn monte_carlo_estimate(
    probe: &Probe,
    geometry: &Geometry,
    plan: &MeasurementPlan,
    trials: usize,
    seed: u64,
) -> Result<McStats> {
    if trials < 100 {
        return Err(Error::invalid("trials", format!("{trials} < 100")));
    }
    if geometry.r_s == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    let (plan, phases, times) = optimal_plan(probe, geometry, plan)?;
    let mean = mean_quadrature(&plan, probe, &phases);
    let variance = quadrature_variance(&plan, probe, &phases, &times);
    let slope = mean_derivative_rs(probe, geometry, &plan)?;
    if !(slope.abs() > 0.0) {
        return Err(Error::ZeroSlope);
    }
    let predicted = quadrature_bound_rs(probe, geometry, &plan)?.relative_error;
    let shot_sigma = (variance / plan.repetitions as f64).sqrt();
    let r_s = geometry.r_s;

    let deviation = |t: usize| {
        let sample_mean = mean + shot_sigma * draw_standard_normal(seed, t as u64);
        (sample_mean - mean) / slope
    };
    #[cfg(feature = "parallel")]
    let deviations: Vec<f64> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(deviation).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let deviations: Vec<f64> = (0..trials).map(deviation).collect();

    let relative: Vec<f64> = deviations.iter().map(|d| d / r_s).collect();
    let (bias, std) = mean_std(&relative);
    let mean_deviation = deviations.iter().sum::<f64>() / trials as f64;
    Ok(McStats {
        trials,
        seed,
        std_relative: std,
        bias_relative: bias,
        bias_standard_error: std / (trials as f64).sqrt(),
        mean_estimate: r_s + mean_deviation,
        predicted_relative: predicted,
        variance,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cr_bound_rs;
    use crate::schwarzschild::linear_phase_phi24;
    use crate::stats::{log_grid, loglog_slope};
    use proptest::prelude::*;

    const M: u64 = 10_000_000_000;

    fn earth() -> Geometry {
        Geometry::earth(10.0, 0.01)
    }

    fn fig2_probe(n: f64, chi: f64) -> Probe {
        Probe::new(n, 1e14, chi)
    }

    #[test]
    fn phases_vanish_without_curvature_or_nonlinearity() {
        let g = Geometry {
            r_s: 0.0,
            ..earth()
        };
        let p = derived_phases(&fig2_probe(1e10, 0.0), &g).unwrap();
        assert_eq!((p.zeta1, p.zeta2, p.beta_dark), (0.0, 0.0, 0.0));
    }

    #[test]
    fn linear_only_dark_port() {
        let g = Geometry {
            n_prime: 1.4,
            ..earth()
        };
        let probe = fig2_probe(1e10, 0.0);
        let p = derived_phases(&probe, &g).unwrap();
        let k = probe.omega / SPEED_OF_LIGHT;
        let phi2 = linear_phase_phi24(&g).unwrap().exact;
        assert!((p.beta_dark - k * (phi2 - p.phi1)).abs() <= 1e-12 * p.beta_dark.abs());
    }

    #[test]
    fn beta_dark_is_zeta_difference() {
        let p = derived_phases(&fig2_probe(1e17, 0.1), &earth()).unwrap();
        let ulp = f64::EPSILON * p.zeta1.abs();
        assert!((p.zeta2 - p.zeta1 - p.beta_dark).abs() <= 2.0 * ulp);
    }

    #[test]
    fn validity_metric_for_desk_scale() {
        let probe = fig2_probe(1e17, 0.1);
        let metric = validity_metric(&probe, &earth());
        let expected = 0.1 * (0.01 / SPEED_OF_LIGHT) * 1e17f64.sqrt();
        assert!((metric / expected - 1.0).abs() < 1e-14);
        assert!((metric - 1.05e-3).abs() < 1e-5);
        assert!(derived_phases(&probe, &earth()).is_ok());
        assert!(matches!(
            derived_phases(&fig2_probe(1e22, 1.0), &earth()),
            Err(Error::Linearization { .. })
        ));
    }

    #[test]
    fn mean_quadrature_cases() {
        let probe = fig2_probe(1e16, 0.1);
        let phases = derived_phases(&probe, &earth()).unwrap();
        let dark = MeasurementPlan::lossless(1).with_settings(0.3, phases.beta_dark);
        assert_eq!(mean_quadrature(&dark, &probe, &phases), 0.0);
        let lost = MeasurementPlan::lossless(1)
            .with_settings(0.3, 1.0)
            .with_losses(0.0, 1.0);
        assert_eq!(mean_quadrature(&lost, &probe, &phases), 0.0);

        // θ + ζ₂ = π/2 and θ + ζ₁ + β = −π/2
        let flat = Probe::new(4.0, 0.0, 0.0);
        let zero = DerivedPhases {
            zeta1: 0.0,
            zeta2: 0.0,
            beta_dark: 0.0,
            phi1: 0.0,
            phi2: 0.0,
        };
        let sym = MeasurementPlan::lossless(1).with_settings(FRAC_PI_2, -std::f64::consts::PI);
        assert!(mean_quadrature(&sym, &flat, &zero).abs() < 1e-15);
    }

    #[test]
    fn shot_noise_without_nonlinearity() {
        let probe = fig2_probe(1e12, 0.0);
        let phases = derived_phases(&probe, &earth()).unwrap();
        let times = arm_proper_times(&earth()).unwrap();
        for (theta, beta) in [(0.0, 0.0), (0.4, -1.3), (2.0, 0.7)] {
            let plan = MeasurementPlan::lossless(1).with_settings(theta, beta);
            assert_eq!(quadrature_variance(&plan, &probe, &phases, &times), 1.0);
        }
    }

    #[test]
    fn optimal_settings_restore_shot_noise() {
        let probe = fig2_probe(1e17, 0.1);
        let (plan, phases, times) =
            optimal_plan(&probe, &earth(), &MeasurementPlan::lossless(M)).unwrap();
        assert!((quadrature_variance(&plan, &probe, &phases, &times) - 1.0).abs() < 1e-9);
        let opt = optimal_settings(&probe, &phases, &times).unwrap();
        assert!(opt.residual.abs() < 1e-12, "residual {}", opt.residual);
    }

    #[test]
    fn flat_space_optimum_is_dark_port() {
        let g = earth().with_r_s(0.0);
        let probe = fig2_probe(1e15, 1.0);
        let phases = derived_phases(&probe, &g).unwrap();
        let times = arm_proper_times(&g).unwrap();
        let opt = optimal_settings(&probe, &phases, &times).unwrap();
        assert_eq!(opt.beta, phases.beta_dark);
    }

    #[test]
    fn optimal_beta_offset_from_dark_port() {
        // strong enough δ for the expansion to be visible, weak enough for it to hold
        for g in [earth(), Geometry::new(1e-3, 1e4, 100.0, 0.01, 1.0).unwrap()] {
            let probe = fig2_probe(1e12, 0.1);
            let phases = derived_phases(&probe, &g).unwrap();
            let times = arm_proper_times(&g).unwrap();
            let opt = optimal_settings(&probe, &phases, &times).unwrap();
            let offset = opt.beta - phases.beta_dark;
            let taylor = -(2.0 * g.delta()).sqrt();
            assert!(
                (offset / taylor - 1.0).abs() < 1e-6,
                "{offset:e} vs {taylor:e}"
            );
            // the coarser −2√δ expansion is off by √2
            assert!(
                (offset / (-2.0 * g.delta().sqrt()) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6
            );
        }
    }

    #[test]
    fn domain_error_when_upper_arm_is_slower() {
        let probe = fig2_probe(1e12, 0.1);
        let phases = derived_phases(&probe, &earth()).unwrap();
        let mut times = arm_proper_times(&earth()).unwrap();
        times.deficit = -1e-20;
        assert!(matches!(
            optimal_settings(&probe, &phases, &times),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn derivative_cases() {
        let g = earth();
        let plan = MeasurementPlan::lossless(M);
        assert_eq!(
            mean_derivative_rs(&fig2_probe(0.0, 0.1), &g, &plan).unwrap(),
            0.0
        );
        let lin = mean_derivative_rs(&fig2_probe(1e12, 0.0), &g, &plan).unwrap();
        let times = arm_proper_times(&g).unwrap();
        let expected = 1e6 * 1e14 * g.delta() / g.r_s * g.tau1() * (1.0 + times.ratio());
        assert!((lin / expected - 1.0).abs() < 1e-12);
        // r_s = 0 stays finite through h/(2 r_A r_B)
        assert!(mean_derivative_rs(&fig2_probe(1e12, 0.1), &g.with_r_s(0.0), &plan).unwrap() > 0.0);
    }

    #[test]
    fn derivative_against_finite_difference() {
        let g = earth();
        let probe = fig2_probe(1e17, 0.1);
        let (plan, _, times) = optimal_plan(&probe, &g, &MeasurementPlan::lossless(M)).unwrap();
        let mean_at = |r_s: f64| {
            let phases = derived_phases(&probe, &g.with_r_s(r_s)).unwrap();
            mean_quadrature(&plan, &probe, &phases)
        };
        let step = 1e-2 * g.r_s;
        let fd = (mean_at(g.r_s + step) - mean_at(g.r_s - step)) / (2.0 * step);
        let analytic = mean_derivative_rs(&probe, &g, &plan).unwrap();
        // at fixed settings only the upper arm responds; the (1 + τ₂/τ₁) factor is not in the slope
        let ratio = analytic / fd.abs();
        assert!(
            (ratio / (1.0 + times.ratio()) - 1.0).abs() < 1e-6,
            "fd {fd:e} analytic {analytic:e}"
        );
    }

    #[test]
    fn quadrature_bound_reduces_to_lossless_formula() {
        let g = earth();
        let (n, chi) = (1e17, 0.1);
        let b =
            quadrature_bound_rs(&fig2_probe(n, chi), &g, &MeasurementPlan::lossless(M)).unwrap();
        let expected = g.r_a * g.r_b() * SPEED_OF_LIGHT
            / (g.arm_length
                * g.h
                * g.r_s
                * (1.0 - g.r_s * g.h / (2.0 * g.r_a * g.r_b()))
                * (1e10 * n * (1e14 + n * chi).powi(2)).sqrt());
        assert!((b.relative_error / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_to_fisher_ratio_tends_to_two() {
        let g = earth();
        for n in [1e15, 1e18, 1e20] {
            let p = fig2_probe(n, 1e4);
            let q = quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M))
                .unwrap()
                .relative_error;
            let f = cr_bound_rs(&p, &g, M).unwrap().relative_error;
            assert!((q / f - 2.0).abs() < 1e-3, "N={n}: {}", q / f);
        }
    }

    #[test]
    fn loss_scaling() {
        let g = earth();
        let p = fig2_probe(1e16, 0.1);
        let full = quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M))
            .unwrap()
            .relative_error;
        let half_a =
            quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M).with_losses(0.5, 1.0))
                .unwrap()
                .relative_error;
        assert!((half_a / full - 2f64.sqrt()).abs() < 1e-12);
        let half_b =
            quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M).with_losses(1.0, 0.5))
                .unwrap()
                .relative_error;
        let rate = |eps_b: f64| 1e14 + eps_b * 1e16 * 0.1;
        let expected = full * 2f64.sqrt() * rate(1.0) / rate(0.5);
        assert!((half_b / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sql_cases() {
        let g = earth();
        let ns = log_grid(8, 20, 2);
        let bounds: Vec<f64> = ns
            .iter()
            .map(|&n| {
                sql_bound_rs(&fig2_probe(n, 6.0), &g, M)
                    .unwrap()
                    .relative_error
            })
            .collect();
        assert!((loglog_slope(&ns, &bounds).unwrap() + 0.5).abs() < 1e-12);
        let p = fig2_probe(1e14, 0.0);
        let sql = sql_bound_rs(&p, &g, M).unwrap();
        let quad = quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M)).unwrap();
        assert_eq!(sql.relative_error, quad.relative_error);
        assert_eq!(sql.method, BoundMethod::Sql);
        let tall = sql_bound_rs(&p, &g.with_h(100.0), M)
            .unwrap()
            .relative_error;
        assert!((sql.relative_error / tall / 10.0 - 1.0).abs() < 2e-5);
    }

    #[test]
    fn squeezed_cases() {
        let g = earth();
        let omega = 1e14;
        // r = 0, ε = 1, N_s = 0: coherent 1/√N with the baseline's own prefactor
        let coh = squeezed_lossy_bound(
            &SqueezedProbe::new(1e12, 0.0, 0.0, 1.0).unwrap(),
            &g,
            omega,
            M,
        )
        .unwrap();
        let expected = g.r_a * g.r_b() * SPEED_OF_LIGHT
            / (2.0 * g.arm_length * g.h * g.r_s * omega * (1e10f64 * 1e12).sqrt());
        assert!((coh.relative_error / expected - 1.0).abs() < 1e-12);
        // ε = 1: εN_c e^{2r} enhancement
        let sq = SqueezedProbe::new(1e12, 0.0, 3.0, 1.0).unwrap();
        assert!((sq.effective_photons() / (1e12 * 6f64.exp()) - 1.0).abs() < 1e-12);
        // small loss caps the enhancement at 1/(1 − ε)
        let lossy = SqueezedProbe::from_squeezed_photons(1e12, 1e12, 1.0 - 1e-6).unwrap();
        assert!(lossy.effective_photons() < 1e12 * 1.001e6);
    }

    #[test]
    fn squeezed_monotone_in_transmission() {
        let g = earth();
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.5, 0.9, 0.999, 1.0 - 1e-6] {
            let sq = SqueezedProbe::from_squeezed_photons(1e14, 1e14, eps).unwrap();
            let b = squeezed_lossy_bound(&sq, &g, 1e14, M)
                .unwrap()
                .relative_error;
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn noise_penalty_even_and_zero_at_optimum() {
        let probe = fig2_probe(1e17, 0.1);
        assert!(noise_penalty_db(&probe, &earth(), 0.0).unwrap().abs() < 1e-9);
        let up = noise_penalty_db(&probe, &earth(), 1e-3).unwrap();
        let down = noise_penalty_db(&probe, &earth(), -1e-3).unwrap();
        assert!(up > 0.0 && down > 0.0);
        assert!((up - down).abs() < 0.05 * up);
        assert!(up < 1.0);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let probe = fig2_probe(1e16, 0.1);
        let a =
            monte_carlo_estimate(&probe, &earth(), &MeasurementPlan::lossless(M), 500, 7).unwrap();
        let b =
            monte_carlo_estimate(&probe, &earth(), &MeasurementPlan::lossless(M), 500, 7).unwrap();
        let c =
            monte_carlo_estimate(&probe, &earth(), &MeasurementPlan::lossless(M), 500, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.std_relative, c.std_relative);
    }

    #[test]
    fn monte_carlo_unbiased_and_on_bound() {
        let probe = fig2_probe(1e16, 0.1);
        let stats = monte_carlo_estimate(
            &probe,
            &earth(),
            &MeasurementPlan::lossless(M).with_losses(0.8, 0.9),
            10_000,
            2024,
        )
        .unwrap();
        assert!(stats.bias_relative.abs() < 3.0 * stats.bias_standard_error);
        assert!((stats.std_relative / stats.predicted_relative - 1.0).abs() < 0.05);
        assert!(
            monte_carlo_estimate(&probe, &earth(), &MeasurementPlan::lossless(M), 10, 1).is_err()
        );
    }

    proptest! {
        #[test]
        fn shot_noise_at_optimum(log_n in 8.0f64..19.0, chi in prop::sample::select(vec![0.0, 1e-6, 1e-2, 0.1, 1.0, 6.0]), eps_b in 0.1f64..1.0) {
            let probe = fig2_probe(10f64.powf(log_n), chi);
            let g = earth();
            prop_assume!(validity_metric(&probe.attenuated(eps_b), &g) <= LINEARIZATION_THRESHOLD);
            let base = MeasurementPlan::lossless(M).with_losses(1.0, eps_b);
            let (plan, phases, times) = optimal_plan(&probe, &g, &base).unwrap();
            let v = quadrature_variance(&plan, &probe, &phases, &times);
            prop_assert!((v - 1.0).abs() < 1e-9, "variance {}", v);
        }

        #[test]
        fn quadrature_never_beats_fisher(log_n in 6.0f64..22.0, chi in 0.0f64..10.0) {
            let p = fig2_probe(10f64.powf(log_n), chi);
            let g = earth();
            let q = quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M)).unwrap().relative_error;
            let f = cr_bound_rs(&p, &g, M).unwrap().relative_error;
            prop_assert!(q >= f);
            prop_assert!(q / f <= 2.0 + 1e-6);
        }

        #[test]
        fn losses_never_help(eps_a in 0.01f64..1.0, eps_b in 0.01f64..1.0, da in 0.0f64..0.5, db in 0.0f64..0.5) {
            let p = fig2_probe(1e16, 0.1);
            let g = earth();
            let at = |a: f64, b: f64| quadrature_bound_rs(&p, &g, &MeasurementPlan::lossless(M).with_losses(a, b)).unwrap().relative_error;
            let hi_a = (eps_a + da).min(1.0);
            let hi_b = (eps_b + db).min(1.0);
            prop_assert!(at(hi_a, eps_b) <= at(eps_a, eps_b));
            prop_assert!(at(eps_a, hi_b) <= at(eps_a, eps_b));
        }
    }
}
