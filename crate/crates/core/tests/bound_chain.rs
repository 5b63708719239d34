use gravkerr::analytic::{cr_bound_rs, cr_bound_tau, qfi_kerr, QfiResult, QfiSource};
use gravkerr::fock::{numeric_qfi, StepPolicy};
use gravkerr::interferometer::{monte_carlo_estimate, quadrature_bound_rs, MeasurementPlan};
use gravkerr::schwarzschild::dtau2_drs;
use gravkerr::{Geometry, Probe};

#[test]
fn fock_qfi_feeds_the_same_bound() {
    // small-N geometry where the Fock route is tractable
    let g = Geometry::new(1.0, 1e3, 10.0, 1.0, 1.0).unwrap();
    let probe = Probe::new(3.0, 2.0, 0.5);
    let numeric = numeric_qfi(&probe, 0.7, StepPolicy::default()).unwrap();
    let qfi = QfiResult {
        value: numeric.value,
        source: QfiSource::Numeric,
        asymptotic: false,
    };
    let tau_bound = cr_bound_tau(&qfi, 100).unwrap();
    let via_fock = tau_bound / (dtau2_drs(&g).unwrap().abs() * g.r_s);
    let analytic = cr_bound_rs(&probe, &g, 100).unwrap().relative_error;
    assert!((via_fock / analytic - 1.0).abs() < 1e-6);
    assert!((numeric.value / qfi_kerr(&probe).unwrap().value - 1.0).abs() < 1e-6);
}

#[test]
fn monte_carlo_with_losses_tracks_lossy_bound() {
    let g = Geometry::earth(10.0, 0.01);
    let probe = Probe::new(1e17, 1e14, 0.1);
    let plan = MeasurementPlan::lossless(10_000_000_000).with_losses(0.5, 0.5);
    let stats = monte_carlo_estimate(&probe, &g, &plan, 10_000, 99).unwrap();
    let bound = quadrature_bound_rs(&probe, &g, &plan)
        .unwrap()
        .relative_error;
    assert_eq!(stats.predicted_relative, bound);
    assert!((stats.std_relative / bound - 1.0).abs() < 0.05);
    assert!(stats.bias_relative.abs() < 3.0 * stats.bias_standard_error);
}

#[test]
fn monte_carlo_rejects_nonlinear_regime() {
    let g = Geometry::earth(10.0, 0.01);
    let probe = Probe::new(1e22, 1e14, 6.0);
    assert!(monte_carlo_estimate(&probe, &g, &MeasurementPlan::lossless(1), 1000, 1).is_err());
}
