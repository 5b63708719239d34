//! Configuration, sweeps and feasibility calculators.

pub mod config;
pub mod feasibility;
pub mod sweep;

pub use config::Config;
pub use feasibility::{
    chi_from_material, chi_from_single_photon_phase, peak_power, report_improvement, y_tilde,
    FeasibilityInput, Improvement, PowerEstimate,
};
pub use sweep::{run_sweep, write_csv, SweepRow, SweepSpec, CSV_HEADER};
