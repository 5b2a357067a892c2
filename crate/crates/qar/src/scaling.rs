//! Parameter sweeps, cooling-power optimization, and third-law exponent
//! extraction.
//!
//! The third-law question: how fast does the optimal cooling power vanish as
//! T_c → 0? With spectral-density rates Γ ∝ ω^d, optimizing J_c over ω_c at
//! each T_c leaves the reduced profile x = ω_c/T_c invariant, so
//! J_c* ∝ T_c^{d+1} — the exponent fit below recovers α = d + 1 for both
//! noise models.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianModel};
use crate::poisson::{
    self, closed_form_jc, dressed_frame, kick_moments, DressedRateSet, KickMoments,
    PoissonNoiseSpec, SolveMode,
};
use crate::thermo::{
    check_cop_chain, cooling_window, cop_carnot, entropy_production, BathSpec, CurrentsReport,
    EntropyReport, OscillatorPair, SECOND_LAW_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// A 1-D evaluation grid. Log grids require positive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl SweepGrid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Result<Self> {
        let g = SweepGrid { start, stop, points, scale: GridScale::Linear };
        g.validate()?;
        Ok(g)
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Result<Self> {
        let g = SweepGrid { start, stop, points, scale: GridScale::Log };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("points", format!("need at least 2 grid points, got {}", self.points)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::invalid("grid", "endpoints must be finite"));
        }
        if self.scale == GridScale::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::invalid("grid", "log grids require positive endpoints"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        match self.scale {
            GridScale::Linear => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
            GridScale::Log => {
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }
}

/// One evaluated steady state, ready for the law audits.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyPoint {
    pub currents: CurrentsReport,
    pub t_hot: f64,
    pub t_cold: f64,
    /// J_c/J_n where both are positive (a cooling point), else None.
    pub cop_machine: Option<f64>,
}

impl SteadyPoint {
    pub fn new(currents: CurrentsReport, t_hot: f64, t_cold: f64) -> Self {
        let cop_machine = if currents.j_cold > 0.0 && currents.j_noise > 0.0 {
            Some(currents.j_cold / currents.j_noise)
        } else {
            None
        };
        SteadyPoint { currents, t_hot, t_cold, cop_machine }
    }
}

/// Outcome of evaluating one grid point: infeasible points are carried, not
/// dropped, so output tables keep their grid alignment.
#[derive(Debug, Clone, Serialize)]
pub enum PointOutcome {
    Feasible(SteadyPoint),
    Infeasible { reason: String },
}

/// One row of a sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub feasible: bool,
    pub currents: Option<CurrentsReport>,
    pub entropy: Option<EntropyReport>,
    pub cop_machine: Option<f64>,
    pub infeasible_reason: Option<String>,
}

/// Evaluate `eval` over the grid (in parallel; evaluators are pure) and
/// audit every feasible row: the first law against the currents' own scale
/// and the second law via `entropy_production`, which fails the sweep loudly
/// on Σ_u < −tolerance.
pub fn sweep(
    grid: &SweepGrid,
    eval: impl Fn(f64) -> Result<PointOutcome> + Sync,
) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let values = grid.values();
    let outcomes: Vec<(f64, Result<PointOutcome>)> = values
        .par_iter()
        .map(|&v| (v, eval(v)))
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    for (value, outcome) in outcomes {
        match outcome? {
            PointOutcome::Feasible(point) => {
                let entropy = entropy_production(&point.currents, point.t_hot, point.t_cold)?;
                rows.push(SweepRow {
                    value,
                    feasible: true,
                    currents: Some(point.currents),
                    entropy: Some(entropy),
                    cop_machine: point.cop_machine,
                    infeasible_reason: None,
                });
            }
            PointOutcome::Infeasible { reason } => rows.push(SweepRow {
                value,
                feasible: false,
                currents: None,
                entropy: None,
                cop_machine: None,
                infeasible_reason: Some(reason),
            }),
        }
    }
    Ok(rows)
}

/// Result of a scalar maximization with an interior-maximum certificate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Optimum {
    pub argument: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

/// Maximize a scalar function on [lo, hi]: coarse scan (log- or
/// linear-spaced), then golden-section refinement to `rel_tol` in the
/// argument. The objective may return None on invalid points (they are
/// excluded from the bracket). Flat or boundary solutions are reported as
/// errors: the caller asked for an interior maximum.
pub fn maximize_scalar(
    f: impl Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    scale: GridScale,
    coarse_points: usize,
    rel_tol: f64,
) -> Result<Optimum> {
    if !(hi > lo) {
        return Err(Error::invalid("bracket", format!("need hi > lo, got [{lo}, {hi}]")));
    }
    let grid = SweepGrid { start: lo, stop: hi, points: coarse_points.max(3), scale };
    grid.validate()?;
    let xs = grid.values();
    let mut evaluations = 0usize;
    let mut best: Option<(usize, f64)> = None;
    let mut vals: Vec<Option<f64>> = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = f(x);
        evaluations += 1;
        if let Some(v) = v {
            if best.map(|(_, b)| v > b).unwrap_or(true) {
                best = Some((vals.len(), v));
            }
        }
        vals.push(v);
    }
    let Some((ibest, _)) = best else {
        return Err(Error::NonConvergence("objective invalid on the whole bracket".into()));
    };
    if ibest == 0 || ibest + 1 == xs.len() {
        return Err(Error::NonConvergence(format!(
            "no interior maximum: best coarse point sits on the bracket boundary at {}",
            xs[ibest]
        )));
    }
    if vals[ibest - 1].is_none() || vals[ibest + 1].is_none() {
        return Err(Error::NonConvergence(
            "maximum borders invalid points; cannot certify an interior bracket".into(),
        ));
    }
    let (mut a, mut b) = (xs[ibest - 1], xs[ibest + 1]);
    let (fa_end, fb_end) = (vals[ibest - 1].unwrap(), vals[ibest + 1].unwrap());
    // golden-section refinement; treat invalid interior points as -inf
    let g = |x: f64| f(x).unwrap_or(f64::NEG_INFINITY);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    evaluations += 2;
    while (b - a) > rel_tol * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        }
        evaluations += 1;
        if evaluations > 500 {
            break;
        }
    }
    let (argument, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if !(value >= fa_end && value >= fb_end) {
        return Err(Error::NonConvergence(
            "refined maximum fell below its bracket endpoints".into(),
        ));
    }
    Ok(Optimum { argument, value, bracket: (a, b), evaluations })
}

/// Least-squares power-law fit J = C·T^α on log-log axes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    pub alpha: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::invalid("points", format!("need at least 3 points, got {}", points.len())));
    }
    for &(t, j) in points {
        if !(t > 0.0) || !(j > 0.0) {
            return Err(Error::invalid("points", format!("nonpositive sample (T = {t}, J = {j}) in fit window")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("points", "all temperatures identical"));
    }
    let alpha = sxy / sxx;
    let intercept = ybar - alpha * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (alpha * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    let tmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let tmax = points.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(ExponentFit {
        alpha,
        log_prefactor: intercept,
        r_squared,
        window: (tmin, tmax),
        points: points.len(),
    })
}

/// Model family for third-law studies, with the couplings that the scaling
/// claim requires: spectral rates Γ ∝ ω^d, and for the kicked model λ tied
/// to ω_c with the impulse at its optimum π/2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "family")]
pub enum ThirdLawModel {
    Gaussian {
        omega_h: f64,
        t_hot: f64,
        kappa: f64,
        /// η is frozen at eta_multiplier × the largest Γ_c in the window so
        /// transport stays Γ_c-limited.
        eta_multiplier: f64,
    },
    Poisson {
        omega_h: f64,
        t_hot: f64,
        kappa: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ThirdLawResult {
    pub dimension: u32,
    pub fit: ExponentFit,
    /// (T_c, optimal ω_c, optimal J_c) per grid temperature.
    pub optima: Vec<(f64, f64, f64)>,
    /// Exponent refit with η reduced ×10 (Gaussian only): sensitivity of the
    /// α estimate to the frozen noise strength.
    pub sensitivity_alpha: Option<f64>,
    pub audited_points: usize,
}

/// Search window for ω_c/T_c; wide enough to contain the optimum (x* < 5
/// for d ≤ 3) with decades of margin on both sides.
const X_WINDOW: (f64, f64) = (0.05, 30.0);

fn audit_gaussian_point(model: &GaussianModel) -> Result<CurrentsReport> {
    let currents = gaussian::all_currents(model)?;
    let (th, tc) = (model.hot.temperature, model.cold.temperature);
    entropy_production(&currents, th, tc)?;
    if let (true, Some(machine)) = (
        cooling_window(&model.pair, th, tc),
        (currents.j_cold > 0.0 && currents.j_noise > 0.0)
            .then(|| currents.j_cold / currents.j_noise),
    ) {
        let otto = gaussian::cop_otto(&model.pair)?;
        let carnot = cop_carnot(th, tc)?;
        if !check_cop_chain(machine, otto, carnot) {
            return Err(Error::Constraint(format!(
                "COP chain violated: machine {machine} vs Otto {otto} vs Carnot {carnot}"
            )));
        }
    }
    Ok(currents)
}

fn gaussian_third_law_fit(
    omega_h: f64,
    t_hot: f64,
    kappa: f64,
    eta: f64,
    d: u32,
    t_values: &[f64],
    audited: &mut usize,
) -> Result<(ExponentFit, Vec<(f64, f64, f64)>)> {
    let mut optima = Vec::with_capacity(t_values.len());
    for &t_c in t_values {
        let objective = |omega_c: f64| -> Option<f64> {
            if omega_c <= 0.0 || omega_c >= omega_h {
                return None;
            }
            let pair = OscillatorPair::new(omega_h, omega_c).ok()?;
            let hot = BathSpec::hot(t_hot, d, kappa).ok()?;
            let cold = BathSpec::cold(t_c, d, kappa).ok()?;
            let model = GaussianModel::from_bath_specs(pair, hot, cold, eta).ok()?;
            Some(gaussian::cooling_current(&model))
        };
        let opt = maximize_scalar(
            objective,
            X_WINDOW.0 * t_c,
            (X_WINDOW.1 * t_c).min(0.9 * omega_h),
            GridScale::Log,
            64,
            1e-6,
        )?;
        // full audit at the optimum
        let pair = OscillatorPair::new(omega_h, opt.argument)?;
        let model = GaussianModel::from_bath_specs(
            pair,
            BathSpec::hot(t_hot, d, kappa)?,
            BathSpec::cold(t_c, d, kappa)?,
            eta,
        )?;
        audit_gaussian_point(&model)?;
        *audited += 1;
        optima.push((t_c, opt.argument, opt.value));
    }
    let samples: Vec<(f64, f64)> = optima.iter().map(|&(t, _, j)| (t, j)).collect();
    Ok((fit_exponent(&samples)?, optima))
}

fn poisson_third_law_point(
    omega_h: f64,
    t_hot: f64,
    kappa: f64,
    d: u32,
    omega_c: f64,
    t_c: f64,
) -> Option<(KickMoments, f64)> {
    if omega_c <= 0.0 || omega_c >= omega_h {
        return None;
    }
    let noise = PoissonNoiseSpec::delta(omega_c, std::f64::consts::FRAC_PI_2).ok()?;
    let kick = kick_moments(&noise);
    let pair = OscillatorPair::new(omega_h, omega_c).ok()?;
    let frame = dressed_frame(&pair, kick.epsilon).ok()?;
    let hot = DressedRateSet::spectral(&frame, &BathSpec::hot(t_hot, d, kappa).ok()?).ok()?;
    let cold = DressedRateSet::spectral(&frame, &BathSpec::cold(t_c, d, kappa).ok()?).ok()?;
    Some((kick, closed_form_jc(&frame, &hot, &cold, &kick)))
}

fn poisson_third_law_fit(
    omega_h: f64,
    t_hot: f64,
    kappa: f64,
    d: u32,
    t_values: &[f64],
    audited: &mut usize,
) -> Result<(ExponentFit, Vec<(f64, f64, f64)>)> {
    let mut optima = Vec::with_capacity(t_values.len());
    for &t_c in t_values {
        let objective = |omega_c: f64| -> Option<f64> {
            poisson_third_law_point(omega_h, t_hot, kappa, d, omega_c, t_c).map(|(_, j)| j)
        };
        let opt = maximize_scalar(
            objective,
            X_WINDOW.0 * t_c,
            (X_WINDOW.1 * t_c).min(0.9 * omega_h),
            GridScale::Log,
            64,
            1e-6,
        )?;
        // audit via the low-temperature moment solve at the optimum
        let noise = PoissonNoiseSpec::delta(opt.argument, std::f64::consts::FRAC_PI_2)?;
        let kick = kick_moments(&noise);
        let pair = OscillatorPair::new(omega_h, opt.argument)?;
        let frame = dressed_frame(&pair, kick.epsilon)?;
        let hot = DressedRateSet::spectral(&frame, &BathSpec::hot(t_hot, d, kappa)?)?;
        let cold = DressedRateSet::spectral(&frame, &BathSpec::cold(t_c, d, kappa)?)?;
        let currents = poisson::steady_currents(&frame, &hot, &cold, &kick, SolveMode::LowT)?;
        entropy_production(&currents, t_hot, t_c)?;
        if currents.j_cold > 0.0 && currents.j_noise > 0.0 {
            let machine = currents.j_cold / currents.j_noise;
            let otto = gaussian::cop_otto(&pair)?;
            let carnot = cop_carnot(t_hot, t_c)?;
            if !check_cop_chain(machine, otto, carnot) {
                return Err(Error::Constraint(format!(
                    "COP chain violated at T_c = {t_c}: {machine} vs {otto} vs {carnot}"
                )));
            }
        }
        *audited += 1;
        optima.push((t_c, opt.argument, opt.value));
    }
    let samples: Vec<(f64, f64)> = optima.iter().map(|&(t, _, j)| (t, j)).collect();
    Ok((fit_exponent(&samples)?, optima))
}

/// Optimized-cooling exponent fits for each bath dimension.
pub fn third_law_study(
    model: &ThirdLawModel,
    dims: &[u32],
    t_grid: &SweepGrid,
) -> Result<Vec<ThirdLawResult>> {
    t_grid.validate()?;
    if t_grid.scale != GridScale::Log {
        return Err(Error::invalid("t_grid", "third-law studies need a log temperature grid"));
    }
    let t_values = t_grid.values();
    let t_max = t_values.iter().cloned().fold(0.0, f64::max);
    dims.par_iter()
        .map(|&d| {
            let mut audited = 0usize;
            match model {
                ThirdLawModel::Gaussian { omega_h, t_hot, kappa, eta_multiplier } => {
                    // freeze η against the largest Γ_c reachable in the window
                    let gamma_c_max = kappa * (X_WINDOW.1 * t_max).powi(d as i32);
                    let eta = eta_multiplier * gamma_c_max;
                    let (fit, optima) = gaussian_third_law_fit(
                        *omega_h, *t_hot, *kappa, eta, d, &t_values, &mut audited,
                    )?;
                    let (sens_fit, _) = gaussian_third_law_fit(
                        *omega_h,
                        *t_hot,
                        *kappa,
                        eta / 10.0,
                        d,
                        &t_values,
                        &mut audited,
                    )?;
                    Ok(ThirdLawResult {
                        dimension: d,
                        fit,
                        optima,
                        sensitivity_alpha: Some(sens_fit.alpha),
                        audited_points: audited,
                    })
                }
                ThirdLawModel::Poisson { omega_h, t_hot, kappa } => {
                    let (fit, optima) = poisson_third_law_fit(
                        *omega_h, *t_hot, *kappa, d, &t_values, &mut audited,
                    )?;
                    Ok(ThirdLawResult {
                        dimension: d,
                        fit,
                        optima,
                        sensitivity_alpha: None,
                        audited_points: audited,
                    })
                }
            }
        })
        .collect()
}

/// Default third-law temperature window: low enough for asymptotics, high
/// enough that occupations stay representable.
pub fn default_third_law_grid() -> SweepGrid {
    SweepGrid { start: 1e-4, stop: 1e-2, points: 20, scale: GridScale::Log }
}

/// Second-law floor re-exported for sweep assertions.
pub const SIGMA_TOL: f64 = SECOND_LAW_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_validation_and_values() {
        assert!(SweepGrid::linear(0.0, 1.0, 1).is_err());
        assert!(SweepGrid::log(0.0, 1.0, 5).is_err());
        let g = SweepGrid::linear(0.0, 2.0, 5).unwrap();
        assert_eq!(g.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let lg = SweepGrid::log(1e-4, 1e-2, 3).unwrap();
        assert_relative_eq!(lg.values()[1], 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn fit_exponent_exact_on_power_laws() {
        let ts: Vec<f64> = (1..=10).map(|i| 1e-4 * 1.6f64.powi(i)).collect();
        let quad: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 7.0 * t * t)).collect();
        let fit = fit_exponent(&quad).unwrap();
        assert_relative_eq!(fit.alpha, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        let three_halves: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 3.0 * t.powf(1.5))).collect();
        assert_relative_eq!(fit_exponent(&three_halves).unwrap().alpha, 1.5, epsilon = 1e-12);
        let negative: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 0.2 * t.powf(-0.75))).collect();
        assert_relative_eq!(fit_exponent(&negative).unwrap().alpha, -0.75, epsilon = 1e-12);
    }

    #[test]
    fn fit_exponent_rejects_bad_input() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)]).is_err());
    }

    #[test]
    fn maximize_scalar_finds_known_optimum() {
        // x² e^{-x}: maximum at x = 2
        let opt = maximize_scalar(
            |x| Some(x * x * (-x).exp()),
            0.1,
            10.0,
            GridScale::Linear,
            40,
            1e-9,
        )
        .unwrap();
        assert_relative_eq!(opt.argument, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn maximize_scalar_reports_boundary_solution() {
        let err = maximize_scalar(|x| Some(x), 0.0, 1.0, GridScale::Linear, 20, 1e-6).unwrap_err();
        assert!(err.to_string().contains("boundary"));
    }

    #[test]
    fn gaussian_optimal_frequency_ratio_matches_stationarity_root() {
        // η ≫ Γ_c and N_h ≈ 0: optimal ω_c/T_c solves 2(1 − e^{−x}) = x,
        // x* ≈ 1.5936 (stationarity of x²/(e^x − 1) for d = 1)
        let t_c = 1e-3;
        let omega_h = 30.0; // pushes N_h below 1e-6
        let t_hot = 2.0;
        let eta = 1e6;
        let objective = |omega_c: f64| -> Option<f64> {
            let pair = OscillatorPair::new(omega_h, omega_c).ok()?;
            let hot = BathSpec::hot(t_hot, 1, 1.0).ok()?;
            let cold = BathSpec::cold(t_c, 1, 1.0).ok()?;
            let m = GaussianModel::from_bath_specs(pair, hot, cold, eta).ok()?;
            Some(gaussian::cooling_current(&m))
        };
        let opt =
            maximize_scalar(objective, 0.05 * t_c, 30.0 * t_c, GridScale::Log, 64, 1e-8).unwrap();
        assert_relative_eq!(opt.argument / t_c, 1.593624, max_relative = 1e-3);
    }

    #[test]
    fn third_law_alpha_matches_dimension_plus_one() {
        // trimmed grid keeps the unit test quick; the acceptance suite runs
        // the full spec window
        let grid = SweepGrid::log(1e-4, 1e-2, 8).unwrap();
        let gm = ThirdLawModel::Gaussian { omega_h: 10.0, t_hot: 2.0, kappa: 1.0, eta_multiplier: 1e3 };
        let results = third_law_study(&gm, &[1, 2], &grid).unwrap();
        for r in &results {
            assert_relative_eq!(r.fit.alpha, (r.dimension + 1) as f64, epsilon = 0.05);
            assert!(r.fit.r_squared > 0.9999);
            let sens = r.sensitivity_alpha.unwrap();
            assert!((sens - r.fit.alpha).abs() < 0.05);
        }
        let pm = ThirdLawModel::Poisson { omega_h: 10.0, t_hot: 2.0, kappa: 1.0 };
        let results = third_law_study(&pm, &[1], &grid).unwrap();
        assert_relative_eq!(results[0].fit.alpha, 2.0, epsilon = 0.05);
    }

    #[test]
    fn sweep_carries_infeasible_rows() {
        let grid = SweepGrid::linear(0.0, 1.0, 5).unwrap();
        let rows = sweep(&grid, |v| {
            if v > 0.6 {
                Ok(PointOutcome::Infeasible { reason: "past the wall".into() })
            } else {
                Ok(PointOutcome::Feasible(SteadyPoint::new(
                    CurrentsReport::new(-2.0 * v, v, v),
                    2.0,
                    1.0,
                )))
            }
        })
        .unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows.iter().filter(|r| !r.feasible).count(), 2);
        assert!(rows[4].infeasible_reason.as_deref() == Some("past the wall"));
        // feasible rows carry entropy
        assert!(rows[1].entropy.is_some());
    }

    #[test]
    fn sweep_rejects_single_point_grid() {
        let grid = SweepGrid { start: 0.0, stop: 1.0, points: 1, scale: GridScale::Linear };
        assert!(sweep(&grid, |_| Ok(PointOutcome::Infeasible { reason: String::new() })).is_err());
    }
}
