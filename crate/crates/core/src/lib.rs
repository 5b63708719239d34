//! Quantum-limited estimation of the Schwarzschild radius with a Kerr-nonlinear
//! Mach-Zehnder interferometer.
//!
//! The crate is layered bottom-up:
//!
//! - [`fock`]: exact truncated number-basis states, Kerr evolution and a
//!   fidelity finite-difference QFI. This is the brute-force oracle.
//! - [`analytic`]: closed-form fidelity expansion, QFI and Cramér-Rao bounds.
//! - [`schwarzschild`]: arm proper times, the dilation parameter δ and the
//!   linear phase of the upper arm.
//! - [`interferometer`]: linearized homodyne model, optimal settings, loss,
//!   the squeezed-probe baseline and a seeded Monte-Carlo estimator check.
//! - [`runner`]: configuration, sweeps, feasibility calculators and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod probe;
pub mod runner;
pub mod schwarzschild;
pub mod stats;

pub use error::{Error, Result};
pub use probe::{KerrVariant, Probe};
pub use schwarzschild::Geometry;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
