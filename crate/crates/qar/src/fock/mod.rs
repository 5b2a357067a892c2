//! Independent brute-force oracle on a truncated two-mode Fock space.
//!
//! Every generator variant in the crate (Gaussian noise, the exact Poisson
//! kick map, its dressed split form, and the finite-temperature work bath)
//! is assembled as an explicit master-equation generator on the truncated
//! space and solved for its stationary density operator. No moment-equation
//! machinery enters this path: the oracle exists to check it.

mod generator;
mod operators;
mod sectors;
mod stationary;
mod sweeps;

pub use generator::{
    build_generator, dense_superoperator, BathSetup, Generator, GeneratorVariant, GroupLabel,
};
pub use operators::{build_dressed_operators, build_mode_operators, DressedOperators, ModeOperators};
pub use sectors::{BlockDiag, BlockTridiag, SectorSpace};
pub use stationary::{
    propagate_to_stationary, stationary_density, stationary_density_with, SolveMethod,
    StationaryDensity, StationaryOptions,
};
pub use sweeps::{
    singular_bath_limit_check, truncation_sweep, SingularBathReport, SingularBathRow,
    TruncationReport, TruncationRow, EDGE_POPULATION_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::CurrentsReport;

/// Default cap on levels_a × levels_b; dense operator storage and the
/// sector solver stay comfortable well past this, but the cap keeps
/// accidental huge configs from eating the machine.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Truncation of the two bosonic modes plus solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    pub levels_a: usize,
    pub levels_b: usize,
    /// Relative tolerance for truncation-convergence verdicts.
    pub convergence_tol: f64,
    pub dimension_cap: usize,
}

impl FockConfig {
    pub fn new(levels_a: usize, levels_b: usize) -> Result<Self> {
        let cfg = FockConfig {
            levels_a,
            levels_b,
            convergence_tol: 1e-6,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.convergence_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels_a < 2 || self.levels_b < 2 {
            return Err(Error::invalid(
                "levels",
                format!("need at least 2 levels per mode, got {}×{}", self.levels_a, self.levels_b),
            ));
        }
        let dim = self.levels_a * self.levels_b;
        if dim > self.dimension_cap {
            return Err(Error::DimensionCap {
                requested: dim,
                cap: self.dimension_cap,
            });
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("convergence_tol", "must be > 0"));
        }
        Ok(())
    }
}

/// Currents extracted from a certified stationary density operator,
/// J_k = tr(L_k(ρ)·H_s).
pub fn currents_from_density(gen: &Generator, sd: &StationaryDensity) -> CurrentsReport {
    gen.currents_from_blocks(&sd.blocks)
}
