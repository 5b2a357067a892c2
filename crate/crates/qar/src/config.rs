//! Run configuration: one TOML file with nested sections, strict about
//! unknown keys so typos fail loudly. CLI flags override file values
//! (flag > file > built-in default); the resolved configuration is echoed
//! into every run report so outputs stay reproducible.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianModel;
use crate::poisson::{PoissonNoiseSpec, PoissonRefrigerator, SolveMode, ZetaMode};
use crate::scaling::{GridScale, SweepGrid};
use crate::thermo::{BathSpec, OscillatorPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Gaussian,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// CSV tables plus the JSON run report.
    Csv,
    /// JSON only (tables embedded in the report payload).
    Structured,
}

/// Physical parameters for both models; the validator checks the subset the
/// chosen model actually needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub omega_h: f64,
    pub omega_c: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    /// Spectral-density dimension and prefactor per bath.
    #[serde(default = "default_dimension")]
    pub dimension_hot: u32,
    #[serde(default = "default_dimension")]
    pub dimension_cold: u32,
    #[serde(default = "default_kappa")]
    pub kappa_hot: f64,
    #[serde(default = "default_kappa")]
    pub kappa_cold: f64,
    /// Gaussian model: direct rate overrides (spectral κω^d when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_c: Option<f64>,
    /// Gaussian model: noise strength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Poisson model: event rate and delta impulse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    /// Poisson model: constant ζ±ᵏ (spectral mode when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default = "default_solve_mode")]
    pub solve_mode: SolveMode,
}

fn default_dimension() -> u32 {
    1
}

fn default_kappa() -> f64 {
    1.0
}

fn default_solve_mode() -> SolveMode {
    SolveMode::Full
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_levels")]
    pub levels_a: usize,
    #[serde(default = "default_levels")]
    pub levels_b: usize,
    #[serde(default = "default_oracle_tol")]
    pub convergence_tol: f64,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

fn default_levels() -> usize {
    12
}

fn default_oracle_tol() -> f64 {
    1e-6
}

fn default_cap() -> usize {
    crate::fock::DEFAULT_DIMENSION_CAP
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            levels_a: default_levels(),
            levels_b: default_levels(),
            convergence_tol: default_oracle_tol(),
            dimension_cap: default_cap(),
        }
    }
}

impl OracleSection {
    pub fn fock_config(&self) -> Result<crate::fock::FockConfig> {
        let cfg = crate::fock::FockConfig {
            levels_a: self.levels_a,
            levels_b: self.levels_b,
            convergence_tol: self.convergence_tol,
            dimension_cap: self.dimension_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Which parameter varies: gaussian models accept "eta", "omega_c",
    /// "t_cold"; poisson models accept "xi0", "lambda", "omega_c", "t_cold".
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: GridScale,
}

fn default_scale() -> GridScale {
    GridScale::Linear
}

impl SweepSection {
    pub fn grid(&self) -> Result<SweepGrid> {
        let g = SweepGrid {
            start: self.start,
            stop: self.stop,
            points: self.points,
            scale: self.scale,
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    #[serde(default = "default_dims")]
    pub dimensions: Vec<u32>,
    #[serde(default = "default_t_start")]
    pub t_start: f64,
    #[serde(default = "default_t_stop")]
    pub t_stop: f64,
    #[serde(default = "default_t_points")]
    pub points: usize,
    #[serde(default = "default_eta_multiplier")]
    pub eta_multiplier: f64,
}

fn default_dims() -> Vec<u32> {
    vec![1, 2, 3]
}

fn default_t_start() -> f64 {
    1e-4
}

fn default_t_stop() -> f64 {
    1e-2
}

fn default_t_points() -> usize {
    20
}

fn default_eta_multiplier() -> f64 {
    1e3
}

impl Default for ScalingSection {
    fn default() -> Self {
        ScalingSection {
            dimensions: default_dims(),
            t_start: default_t_start(),
            t_stop: default_t_stop(),
            points: default_t_points(),
            eta_multiplier: default_eta_multiplier(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_jobs() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_out_dir(),
            format: default_format(),
            jobs: default_jobs(),
        }
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub physical: PhysicalConfig,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub scaling: ScalingSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse failure: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The reference operating point: the kicked refrigerator at
    /// T_c = 10⁻³, T_h = 2, ω_c = T_c, ω_h = 10, λ = ω_c, ζ±ᵏ = ω_c/10,
    /// solved in the low-temperature mode where the impulse zeros are exact.
    pub fn reference_poisson() -> RunConfig {
        RunConfig {
            model: ModelChoice::Poisson,
            physical: PhysicalConfig {
                omega_h: 10.0,
                omega_c: 1e-3,
                t_hot: 2.0,
                t_cold: 1e-3,
                dimension_hot: 1,
                dimension_cold: 1,
                kappa_hot: 1.0,
                kappa_cold: 1.0,
                gamma_h: None,
                gamma_c: None,
                eta: None,
                lambda: Some(1e-3),
                xi0: Some(std::f64::consts::FRAC_PI_2),
                zeta: Some(1e-4),
                solve_mode: SolveMode::LowT,
            },
            oracle: OracleSection::default(),
            sweep: None,
            scaling: ScalingSection::default(),
            output: OutputSection::default(),
        }
    }

    /// Gaussian counterpart of the reference point (rates of order one,
    /// occupations 0.25/0.5).
    pub fn reference_gaussian() -> RunConfig {
        RunConfig {
            model: ModelChoice::Gaussian,
            physical: PhysicalConfig {
                omega_h: 2.0,
                omega_c: 1.0,
                t_hot: 2.0 / (1.0 + 1.0 / 0.25f64).ln(),
                t_cold: 1.0 / (1.0 + 1.0 / 0.5f64).ln(),
                dimension_hot: 1,
                dimension_cold: 1,
                kappa_hot: 1.0,
                kappa_cold: 1.0,
                gamma_h: Some(1.0),
                gamma_c: Some(1.0),
                eta: Some(0.5),
                lambda: None,
                xi0: None,
                zeta: None,
                solve_mode: SolveMode::Full,
            },
            oracle: OracleSection::default(),
            sweep: None,
            scaling: ScalingSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn pair(&self) -> Result<OscillatorPair> {
        OscillatorPair::new(self.physical.omega_h, self.physical.omega_c)
    }

    pub fn hot_bath(&self) -> Result<BathSpec> {
        BathSpec::hot(
            self.physical.t_hot,
            self.physical.dimension_hot,
            self.physical.kappa_hot,
        )
    }

    pub fn cold_bath(&self) -> Result<BathSpec> {
        BathSpec::cold(
            self.physical.t_cold,
            self.physical.dimension_cold,
            self.physical.kappa_cold,
        )
    }

    /// Build the Gaussian model this config describes.
    pub fn gaussian_model(&self) -> Result<GaussianModel> {
        if self.model != ModelChoice::Gaussian {
            return Err(Error::Config("config selects the poisson model".into()));
        }
        let eta = self
            .physical
            .eta
            .ok_or_else(|| Error::invalid("physical.eta", "required for the gaussian model"))?;
        let pair = self.pair()?;
        let hot = self.hot_bath()?;
        let cold = self.cold_bath()?;
        match (self.physical.gamma_h, self.physical.gamma_c) {
            (Some(gh), Some(gc)) => GaussianModel::with_rates(pair, hot, cold, gh, gc, eta),
            (None, None) => GaussianModel::from_bath_specs(pair, hot, cold, eta),
            _ => Err(Error::invalid(
                "physical.gamma_h/gamma_c",
                "override both rates or neither",
            )),
        }
    }

    /// Build the Poisson refrigerator this config describes.
    pub fn poisson_refrigerator(&self) -> Result<PoissonRefrigerator> {
        if self.model != ModelChoice::Poisson {
            return Err(Error::Config("config selects the gaussian model".into()));
        }
        let lambda = self
            .physical
            .lambda
            .ok_or_else(|| Error::invalid("physical.lambda", "required for the poisson model"))?;
        let xi0 = self
            .physical
            .xi0
            .ok_or_else(|| Error::invalid("physical.xi0", "required for the poisson model"))?;
        let noise = PoissonNoiseSpec::delta(lambda, xi0)?;
        let zeta_mode = match self.physical.zeta {
            Some(z) => ZetaMode::Constant(z),
            None => ZetaMode::Spectral,
        };
        PoissonRefrigerator::new(self.pair()?, self.hot_bath()?, self.cold_bath()?, noise, zeta_mode)
    }

    /// Validate whatever the chosen model needs, without running anything.
    pub fn validate(&self) -> Result<()> {
        match self.model {
            ModelChoice::Gaussian => {
                self.gaussian_model()?;
            }
            ModelChoice::Poisson => {
                self.poisson_refrigerator()?;
            }
        }
        self.oracle.fock_config()?;
        if let Some(sweep) = &self.sweep {
            sweep.grid()?;
            let known: &[&str] = match self.model {
                ModelChoice::Gaussian => &["eta", "omega_c", "t_cold"],
                ModelChoice::Poisson => &["xi0", "lambda", "omega_c", "t_cold"],
            };
            if !known.contains(&sweep.parameter.as_str()) {
                return Err(Error::invalid(
                    "sweep.parameter",
                    format!("unknown parameter `{}`; expected one of {known:?}", sweep.parameter),
                ));
            }
        }
        if self.output.jobs == 0 {
            return Err(Error::invalid("output.jobs", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configs_validate() {
        RunConfig::reference_poisson().validate().unwrap();
        RunConfig::reference_gaussian().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"
model = "gaussian"
[physical]
omega_h = 2.0
omega_c = 1.0
t_hot = 1.0
t_cold = 0.5
eta = 0.1
gamma_h = 1.0
gamma_c = 1.0
typo_field = 3
"#;
        let err = RunConfig::from_toml_str(text).unwrap_err();
        assert!(err.to_string().contains("typo_field"), "{err}");
    }

    #[test]
    fn roundtrips_through_toml() {
        let cfg = RunConfig::reference_poisson();
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn missing_model_fields_are_named() {
        let mut cfg = RunConfig::reference_gaussian();
        cfg.physical.eta = None;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("physical.eta"), "{err}");
    }

    #[test]
    fn infeasible_poisson_config_is_constraint_error() {
        let mut cfg = RunConfig::reference_poisson();
        // λ large enough that ε² ≥ ω_h ω_c
        cfg.physical.lambda = Some(500.0);
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("epsilon"), "{err}");
    }

    #[test]
    fn sweep_parameter_names_checked() {
        let mut cfg = RunConfig::reference_poisson();
        cfg.sweep = Some(SweepSection {
            parameter: "bogus".into(),
            start: 0.0,
            stop: 1.0,
            points: 5,
            scale: GridScale::Linear,
        });
        assert!(cfg.validate().is_err());
    }
}
