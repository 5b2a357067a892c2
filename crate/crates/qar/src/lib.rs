//! Steady-state thermodynamics of noise-driven quantum absorption
//! refrigerators.
//!
//! A two-oscillator working medium (ω_h, ω_c) couples to hot and cold
//! thermal baths while white noise drives the swap coupling between the
//! oscillators, replacing the work input of a conventional refrigerator.
//! The crate provides:
//!
//! - [`gaussian`] — Gaussian white noise: exact SU(2) moment equations,
//!   closed-form cooling current and Otto COP.
//! - [`poisson`] — Poisson (random-kick) noise: impulse statistics → (ε, η),
//!   dressed normal modes, detailed-balanced dressed dissipators, full and
//!   low-temperature moment systems, closed-form current.
//! - [`fock`] — an independent brute-force oracle: the same master equations
//!   built as matrices on a truncated two-mode Fock space and solved for the
//!   stationary density operator.
//! - [`scaling`] — parameter sweeps, cooling-power optimization, and
//!   third-law exponent fits (J_c ∝ T_c^α with α = d + 1).
//! - [`config`]/[`report`]/[`run`] — reproducible-run plumbing behind the
//!   `qar` binary (subcommands `steady`, `sweep`, `fig2`, `scaling`,
//!   `oracle`).
//!
//! Units: ħ = k_B = 1 throughout. Currents are positive when energy flows
//! from a reservoir into the working medium.
//!
//! See the crate examples for runnable tours of each capability.

pub mod config;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod poisson;
pub mod report;
pub mod run;
pub mod scaling;
pub mod thermo;

pub use error::{Error, Result};

/// Version string embedded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
