//! Shared physical types, Planck occupations, spectral-density rates, and
//! first/second-law audits.
//!
//! Natural units ħ = k_B = 1 throughout: frequencies, temperatures, and
//! energies share one unit, rates are frequencies, currents are
//! energy/time = frequency².
//!
//! Sign convention: every current J_k is positive when energy flows from
//! reservoir k *into* the working medium, so steady state means
//! J_h + J_c + J_noise = 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default audit tolerance (relative). All primary solves are dense linear
/// algebra at machine precision, so 1e−10 leaves five digits of headroom.
pub const DEFAULT_LAW_TOL: f64 = 1e-10;

/// Second-law tolerance on Σ_u (absolute, entropy/time units).
pub const SECOND_LAW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathLabel {
    Hot,
    Cold,
}

/// One thermal reservoir: temperature, spatial dimension of the bosonic
/// field, and the coupling prefactor of its spectral density.
///
/// The kinetic coefficient for a mode of frequency ω coupled to this bath is
/// Γ = κ·ω^d ([`bath_rate`]), the power law appropriate for emission and
/// absorption of quanta of an electromagnetic or acoustic phonon field of
/// dimension d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Temperature in energy units (k_B = 1). Strictly positive.
    pub temperature: f64,
    /// Bath dimension d ∈ {1, 2, 3}.
    pub dimension_d: u32,
    /// Rate prefactor κ (units of rate / frequency^d). Strictly positive.
    pub coupling_kappa: f64,
    pub label: BathLabel,
}

impl BathSpec {
    pub fn new(temperature: f64, dimension_d: u32, coupling_kappa: f64, label: BathLabel) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::invalid("temperature", format!("must be > 0, got {temperature}")));
        }
        if !(1..=3).contains(&dimension_d) {
            return Err(Error::invalid("dimension_d", format!("must be 1, 2 or 3, got {dimension_d}")));
        }
        if !(coupling_kappa > 0.0) {
            return Err(Error::invalid("coupling_kappa", format!("must be > 0, got {coupling_kappa}")));
        }
        Ok(BathSpec { temperature, dimension_d, coupling_kappa, label })
    }

    pub fn hot(temperature: f64, dimension_d: u32, coupling_kappa: f64) -> Result<Self> {
        Self::new(temperature, dimension_d, coupling_kappa, BathLabel::Hot)
    }

    pub fn cold(temperature: f64, dimension_d: u32, coupling_kappa: f64) -> Result<Self> {
        Self::new(temperature, dimension_d, coupling_kappa, BathLabel::Cold)
    }
}

/// The two working-medium oscillators (ħ = 1). Refrigerator configurations
/// additionally have ω_h > ω_c, but the type admits any positive pair so
/// heating regimes can be studied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorPair {
    pub omega_h: f64,
    pub omega_c: f64,
}

impl OscillatorPair {
    pub fn new(omega_h: f64, omega_c: f64) -> Result<Self> {
        if !(omega_h > 0.0) {
            return Err(Error::invalid("omega_h", format!("must be > 0, got {omega_h}")));
        }
        if !(omega_c > 0.0) {
            return Err(Error::invalid("omega_c", format!("must be > 0, got {omega_c}")));
        }
        Ok(OscillatorPair { omega_h, omega_c })
    }

    /// ω_h − ω_c, the quantum of energy drawn from the noise per transferred
    /// excitation.
    pub fn splitting(&self) -> f64 {
        self.omega_h - self.omega_c
    }

    pub fn is_refrigerator(&self) -> bool {
        self.omega_h > self.omega_c
    }
}

/// Steady-state heat currents, system-directed, plus the first-law residual
/// J_h + J_c + J_noise (identically the energy balance of the working
/// medium; must vanish to solver precision at a converged steady state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentsReport {
    pub j_hot: f64,
    pub j_cold: f64,
    pub j_noise: f64,
    pub first_law_residual: f64,
}

impl CurrentsReport {
    pub fn new(j_hot: f64, j_cold: f64, j_noise: f64) -> Self {
        CurrentsReport {
            j_hot,
            j_cold,
            j_noise,
            first_law_residual: j_hot + j_cold + j_noise,
        }
    }

    /// Magnitude scale for relative residual checks.
    pub fn scale(&self) -> f64 {
        self.j_hot
            .abs()
            .max(self.j_cold.abs())
            .max(self.j_noise.abs())
    }

    /// |J_h + J_c + J_n| ≤ tol · max(|J_k|, floor)?
    pub fn first_law_ok(&self, tol: f64, floor: f64) -> bool {
        self.first_law_residual.abs() <= tol * self.scale().max(floor)
    }
}

/// Entropy production rates Σ_k = −J_k/T_k. The noise reservoir is the
/// T_w → ∞ singular bath, so its entropy flux is exactly zero and the total
/// carries hot and cold terms only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub sigma_hot: f64,
    pub sigma_cold: f64,
    pub sigma_total: f64,
}

/// Planck (Bose–Einstein) occupation N(ω, T) = 1/(e^{ω/T} − 1).
///
/// T = 0 is accepted and returns 0; ω ≤ 0 is rejected. Uses `exp_m1` so the
/// high-temperature side is fully accurate.
pub fn planck_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if temperature < 0.0 || temperature.is_nan() {
        return Err(Error::invalid("temperature", format!("must be ≥ 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = omega / temperature;
    let denom = x.exp_m1();
    if denom.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 / denom)
}

/// Kinetic coefficient Γ(ω) = κ·ω^d for a mode at ω coupled to `bath`.
pub fn bath_rate(omega: f64, bath: &BathSpec) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    Ok(bath.coupling_kappa * omega.powi(bath.dimension_d as i32))
}

/// Cooling condition N_c > N_h ⇔ ω_h/T_h > ω_c/T_c.
///
/// Temperatures must be positive (documented precondition; the comparison is
/// meaningless otherwise).
pub fn cooling_window(pair: &OscillatorPair, t_hot: f64, t_cold: f64) -> bool {
    debug_assert!(t_hot > 0.0 && t_cold > 0.0);
    pair.omega_h / t_hot > pair.omega_c / t_cold
}

/// Entropy production from steady-state currents. Fails loudly (instead of
/// silently passing) when Σ_u < −tol, which signals a thermodynamically
/// inconsistent generator; T ≤ 0 is rejected.
pub fn entropy_production(currents: &CurrentsReport, t_hot: f64, t_cold: f64) -> Result<EntropyReport> {
    entropy_production_with_tol(currents, t_hot, t_cold, SECOND_LAW_TOL)
}

pub fn entropy_production_with_tol(
    currents: &CurrentsReport,
    t_hot: f64,
    t_cold: f64,
    tol: f64,
) -> Result<EntropyReport> {
    if !(t_hot > 0.0) {
        return Err(Error::invalid("t_hot", format!("must be > 0, got {t_hot}")));
    }
    if !(t_cold > 0.0) {
        return Err(Error::invalid("t_cold", format!("must be > 0, got {t_cold}")));
    }
    let sigma_hot = -currents.j_hot / t_hot;
    let sigma_cold = -currents.j_cold / t_cold;
    let sigma_total = sigma_hot + sigma_cold;
    if sigma_total < -tol {
        return Err(Error::SecondLawViolation {
            sigma_hot,
            sigma_cold,
            sigma_total,
        });
    }
    Ok(EntropyReport {
        sigma_hot,
        sigma_cold,
        sigma_total,
    })
}

/// Carnot COP for refrigeration, T_c/(T_h − T_c).
pub fn cop_carnot(t_hot: f64, t_cold: f64) -> Result<f64> {
    if !(t_cold > 0.0) || !(t_hot > t_cold) {
        return Err(Error::invalid(
            "temperatures",
            format!("need T_h > T_c > 0, got T_h = {t_hot}, T_c = {t_cold}"),
        ));
    }
    Ok(t_cold / (t_hot - t_cold))
}

/// COP chain COP_machine ≤ COP_Otto ≤ COP_Carnot, each up to `DEFAULT_LAW_TOL`
/// slack so boundary equalities count as satisfied. Non-finite or negative
/// inputs yield `false`.
pub fn check_cop_chain(cop_machine: f64, cop_otto: f64, cop_carnot: f64) -> bool {
    check_cop_chain_with_tol(cop_machine, cop_otto, cop_carnot, DEFAULT_LAW_TOL)
}

pub fn check_cop_chain_with_tol(cop_machine: f64, cop_otto: f64, cop_carnot: f64, tol: f64) -> bool {
    let vals = [cop_machine, cop_otto, cop_carnot];
    if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return false;
    }
    let slack = |x: f64| tol * x.abs().max(1.0);
    cop_machine <= cop_otto + slack(cop_otto) && cop_otto <= cop_carnot + slack(cop_carnot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planck_zero_temperature() {
        assert_eq!(planck_occupation(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn planck_ln2_point() {
        // T = 1/ln 2 gives e^{ω/T} = 2 at ω = 1
        let n = planck_occupation(1.0, 1.0 / 2f64.ln()).unwrap();
        assert_relative_eq!(n, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn planck_high_temperature() {
        let n = planck_occupation(1.0, 10.0).unwrap();
        assert_relative_eq!(n, 9.508_331_944_775, epsilon = 1e-10);
    }

    #[test]
    fn planck_extreme_ratio_underflows_to_zero() {
        assert_eq!(planck_occupation(10.0, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn planck_rejects_nonpositive_omega() {
        assert!(planck_occupation(0.0, 1.0).is_err());
        assert!(planck_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn planck_detailed_balance_identity() {
        // N/(N+1) = e^{−ω/T}
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let omega = rng.gen_range(0.01..10.0);
            let t = rng.gen_range(0.01..5.0);
            let n = planck_occupation(omega, t).unwrap();
            assert_relative_eq!(n / (n + 1.0), (-omega / t).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn planck_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let omega = rng.gen_range(0.01..10.0);
            let t = rng.gen_range(0.01..5.0);
            let n = planck_occupation(omega, t).unwrap();
            assert!(planck_occupation(omega, t * 1.01).unwrap() > n);
            assert!(planck_occupation(omega * 1.01, t).unwrap() < n);
        }
    }

    #[test]
    fn bath_rate_power_law() {
        let b1 = BathSpec::hot(1.0, 1, 0.1).unwrap();
        assert_relative_eq!(bath_rate(1.0, &b1).unwrap(), 0.1);
        let b3 = BathSpec::hot(1.0, 3, 0.1).unwrap();
        assert_relative_eq!(bath_rate(2.0, &b3).unwrap(), 0.8);
        // ζ = ω_c/10 at ω_c = 1e−3, d = 1, κ = 0.1
        let bf = BathSpec::cold(1e-3, 1, 0.1).unwrap();
        assert_relative_eq!(bath_rate(1e-3, &bf).unwrap(), 1e-4, epsilon = 1e-18);
    }

    #[test]
    fn bath_spec_validation() {
        assert!(BathSpec::hot(-1.0, 1, 1.0).is_err());
        assert!(BathSpec::hot(1.0, 0, 1.0).is_err());
        assert!(BathSpec::hot(1.0, 4, 1.0).is_err());
        assert!(BathSpec::hot(1.0, 1, 0.0).is_err());
    }

    #[test]
    fn cooling_window_cases() {
        let fig2 = OscillatorPair::new(10.0, 0.001).unwrap();
        assert!(cooling_window(&fig2, 2.0, 0.001)); // 5 > 1
        let p = OscillatorPair::new(2.0, 1.0).unwrap();
        assert!(!cooling_window(&p, 2.0, 1.0)); // boundary 1 = 1
        assert!(!cooling_window(&p, 4.0, 1.0)); // 0.5 < 1
    }

    #[test]
    fn cooling_window_matches_occupation_comparison() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let pair = OscillatorPair::new(rng.gen_range(0.01..10.0), rng.gen_range(0.01..10.0)).unwrap();
            let th = rng.gen_range(0.01..5.0);
            let tc = rng.gen_range(0.01..5.0);
            let nh = planck_occupation(pair.omega_h, th).unwrap();
            let nc = planck_occupation(pair.omega_c, tc).unwrap();
            assert_eq!(cooling_window(&pair, th, tc), nc > nh);
        }
    }

    #[test]
    fn entropy_dead_refrigerator_is_all_zero() {
        let c = CurrentsReport::new(0.0, 0.0, 0.0);
        let e = entropy_production(&c, 2.0, 1.0).unwrap();
        assert_eq!(e.sigma_hot, 0.0);
        assert_eq!(e.sigma_cold, 0.0);
        assert_eq!(e.sigma_total, 0.0);
    }

    #[test]
    fn entropy_flags_second_law_violation() {
        // Deliberately inconsistent inputs: cooling with too little heat
        // rejected into the hot bath.
        let c = CurrentsReport::new(-2e-6, 1e-6, 1e-6);
        let err = entropy_production(&c, 2.0, 1e-3).unwrap_err();
        match err {
            Error::SecondLawViolation { sigma_hot, sigma_cold, .. } => {
                assert_relative_eq!(sigma_cold, -1e-3, epsilon = 1e-18);
                assert_relative_eq!(sigma_hot, 1e-6, epsilon = 1e-18);
            }
            other => panic!("expected SecondLawViolation, got {other:?}"),
        }
    }

    #[test]
    fn entropy_rejects_zero_temperature() {
        let c = CurrentsReport::new(0.0, 0.0, 0.0);
        assert!(entropy_production(&c, 2.0, 0.0).is_err());
    }

    #[test]
    fn cop_chain_cases() {
        assert!(check_cop_chain(1.0, 1.0, 1.0)); // boundary equalities
        assert!(!check_cop_chain(2.1, 2.0, 3.0)); // machine exceeds Otto
        assert!(!check_cop_chain(f64::NAN, 1.0, 2.0));
        // Otto 1 vs Carnot 2 for ω = (2,1), T = (1.5, 1)
        let otto = 1.0 / (2.0 - 1.0);
        let carnot = cop_carnot(1.5, 1.0).unwrap();
        assert!(check_cop_chain(otto, otto, carnot));
    }
}
