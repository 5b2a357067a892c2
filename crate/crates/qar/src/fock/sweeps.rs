//! Truncation convergence and the singular-bath limit check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::GaussianModel;
use crate::thermo::CurrentsReport;

use super::generator::Generator;
use super::stationary::{stationary_density, StationaryDensity};
use super::FockConfig;

/// Population above which the truncation edge is considered contaminated.
pub const EDGE_POPULATION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct TruncationRow {
    pub levels_a: usize,
    pub levels_b: usize,
    pub currents: CurrentsReport,
    /// Relative change of J_c against the previous ladder rung.
    pub rel_diff: Option<f64>,
    pub edge_population_a: f64,
    pub edge_population_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    pub rows: Vec<TruncationRow>,
    pub converged: bool,
    /// Last successive relative difference (the achieved tolerance).
    pub achieved_tol: f64,
    /// True when the final rung still holds > `EDGE_POPULATION_LIMIT` at an
    /// edge level, i.e. the truncation cannot be trusted at the requested
    /// tolerance.
    pub edge_warning: bool,
}

/// Solve the same model on an increasing ladder of truncations and report
/// successive relative differences of the cooling current. `converged` means
/// the last difference fell below the final config's `convergence_tol`.
pub fn truncation_sweep(
    ladder: &[FockConfig],
    build: impl Fn(&FockConfig) -> Result<Generator>,
) -> Result<TruncationReport> {
    if ladder.len() < 2 {
        return Err(Error::invalid("ladder", "need at least two truncations"));
    }
    for w in ladder.windows(2) {
        if w[1].levels_a * w[1].levels_b <= w[0].levels_a * w[0].levels_b {
            return Err(Error::invalid("ladder", "truncations must strictly increase"));
        }
    }
    let mut rows: Vec<TruncationRow> = Vec::with_capacity(ladder.len());
    let mut prev_jc: Option<f64> = None;
    for cfg in ladder {
        let gen = build(cfg)?;
        let sd = stationary_density(&gen)?;
        let currents = gen.currents_from_blocks(&sd.blocks);
        let (ea, eb) = gen.edge_populations(&sd.blocks);
        let rel_diff = prev_jc.map(|p| {
            let scale = currents.j_cold.abs().max(p.abs()).max(1e-300);
            (currents.j_cold - p).abs() / scale
        });
        prev_jc = Some(currents.j_cold);
        rows.push(TruncationRow {
            levels_a: cfg.levels_a,
            levels_b: cfg.levels_b,
            currents,
            rel_diff,
            edge_population_a: ea,
            edge_population_b: eb,
        });
    }
    let achieved_tol = rows.last().and_then(|r| r.rel_diff).unwrap_or(f64::NAN);
    let tol = ladder.last().unwrap().convergence_tol;
    let last = rows.last().unwrap();
    let edge_warning = last.edge_population_a > EDGE_POPULATION_LIMIT
        || last.edge_population_b > EDGE_POPULATION_LIMIT;
    let converged = achieved_tol.is_finite() && achieved_tol < tol;
    if !converged {
        // reported, not fatal: the caller sees the achieved tolerance
    }
    Ok(TruncationReport {
        rows,
        converged,
        achieved_tol,
        edge_warning,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularBathRow {
    pub n_w: f64,
    pub gamma_w: f64,
    pub currents: CurrentsReport,
    /// max_k |J_k(work bath) − J_k(gaussian)| / max_k |J_k(gaussian)|
    pub rel_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularBathReport {
    pub eta_target: f64,
    pub gaussian_currents: CurrentsReport,
    pub rows: Vec<SingularBathRow>,
    pub deviations_strictly_decreasing: bool,
    /// Linear 1/N_w extrapolation of the last two rungs, per current.
    pub extrapolated: CurrentsReport,
    pub extrapolation_rel_dev: f64,
}

fn rel_dev(a: &CurrentsReport, reference: &CurrentsReport) -> f64 {
    let scale = reference.scale().max(1e-300);
    let dh = (a.j_hot - reference.j_hot).abs();
    let dc = (a.j_cold - reference.j_cold).abs();
    let dn = (a.j_noise - reference.j_noise).abs();
    dh.max(dc).max(dn) / scale
}

/// Drive the work bath toward its singular limit: for each N_w in the ladder
/// build the finite-temperature work bath at Γ_w = η/N_w, compare its
/// stationary currents against the Gaussian-noise variant at strength η
/// (same truncation), and extrapolate the ladder to N_w → ∞ linearly in
/// 1/N_w.
pub fn singular_bath_limit_check(
    config: &FockConfig,
    model: &GaussianModel,
    n_w_ladder: &[f64],
) -> Result<SingularBathReport> {
    let eta_target = model.eta;
    if !(eta_target > 0.0) {
        return Err(Error::invalid("eta", "singular-bath check needs eta > 0"));
    }
    if n_w_ladder.len() < 2 {
        return Err(Error::invalid("n_w_ladder", "need at least two N_w values"));
    }
    let gauss_gen = Generator::gaussian(config, model)?;
    let gauss_sd = stationary_density(&gauss_gen)?;
    let gaussian_currents = gauss_gen.currents_from_blocks(&gauss_sd.blocks);

    let mut rows = Vec::with_capacity(n_w_ladder.len());
    for &n_w in n_w_ladder {
        if !(n_w > 0.0) {
            return Err(Error::invalid("n_w_ladder", format!("N_w must be > 0, got {n_w}")));
        }
        let gamma_w = eta_target / n_w;
        let gen = Generator::work_bath(config, model, gamma_w, n_w)?;
        let sd: StationaryDensity = stationary_density(&gen)?;
        let currents = gen.currents_from_blocks(&sd.blocks);
        rows.push(SingularBathRow {
            n_w,
            gamma_w,
            currents,
            rel_deviation: rel_dev(&currents, &gaussian_currents),
        });
    }
    let deviations_strictly_decreasing = rows
        .windows(2)
        .all(|w| w[1].rel_deviation < w[0].rel_deviation);

    // linear extrapolation in x = 1/N_w from the two largest rungs
    let k = rows.len();
    let (r1, r2) = (&rows[k - 2], &rows[k - 1]);
    let (x1, x2) = (1.0 / r1.n_w, 1.0 / r2.n_w);
    let lift = |f1: f64, f2: f64| (x1 * f2 - x2 * f1) / (x1 - x2);
    let extrapolated = CurrentsReport::new(
        lift(r1.currents.j_hot, r2.currents.j_hot),
        lift(r1.currents.j_cold, r2.currents.j_cold),
        lift(r1.currents.j_noise, r2.currents.j_noise),
    );
    let extrapolation_rel_dev = rel_dev(&extrapolated, &gaussian_currents);
    Ok(SingularBathReport {
        eta_target,
        gaussian_currents,
        rows,
        deviations_strictly_decreasing,
        extrapolated,
        extrapolation_rel_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::{BathSpec, OscillatorPair};

    fn worked_model() -> GaussianModel {
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let hot = BathSpec::hot(2.0 / (1.0 + 1.0 / 0.25f64).ln(), 1, 1.0).unwrap();
        let cold = BathSpec::cold(1.0 / (1.0 + 1.0 / 0.5f64).ln(), 1, 1.0).unwrap();
        GaussianModel::with_rates(pair, hot, cold, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn truncation_ladder_converges_for_modest_occupations() {
        let ladder: Vec<FockConfig> = [6, 8, 10, 12]
            .iter()
            .map(|&l| FockConfig::new(l, l).unwrap().with_tol(2e-4))
            .collect();
        let model = worked_model();
        let report = truncation_sweep(&ladder, |cfg| Generator::gaussian(cfg, &model)).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.converged, "achieved {}", report.achieved_tol);
        assert!(report.achieved_tol < 2e-4);
        // differences shrink monotonically for a thermal tail
        let diffs: Vec<f64> = report.rows.iter().filter_map(|r| r.rel_diff).collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn hot_bath_with_tiny_truncation_warns() {
        // occupations near 2 at 4 levels: the edge holds visible weight
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let hot = BathSpec::hot(5.0, 1, 1.0).unwrap();
        let cold = BathSpec::cold(2.5, 1, 1.0).unwrap();
        let model = GaussianModel::with_rates(pair, hot, cold, 1.0, 1.0, 0.5).unwrap();
        let ladder = [FockConfig::new(4, 4).unwrap(), FockConfig::new(5, 5).unwrap()];
        let report = truncation_sweep(&ladder, |cfg| Generator::gaussian(cfg, &model)).unwrap();
        assert!(report.edge_warning);
        assert!(!report.converged);
    }

    #[test]
    fn uncoupled_case_converges_immediately() {
        let mut model = worked_model();
        model.eta = 0.0;
        let ladder = [FockConfig::new(8, 8).unwrap(), FockConfig::new(10, 10).unwrap()];
        let report = truncation_sweep(&ladder, |cfg| Generator::gaussian(cfg, &model)).unwrap();
        // J_c = 0 at every truncation covering the occupation support
        for row in &report.rows {
            assert!(row.currents.j_cold.abs() < 1e-10);
        }
    }

    #[test]
    fn ladder_validation() {
        let model = worked_model();
        let single = [FockConfig::new(8, 8).unwrap()];
        assert!(truncation_sweep(&single, |cfg| Generator::gaussian(cfg, &model)).is_err());
        let non_increasing = [FockConfig::new(8, 8).unwrap(), FockConfig::new(8, 8).unwrap()];
        assert!(truncation_sweep(&non_increasing, |cfg| Generator::gaussian(cfg, &model)).is_err());
    }

    #[test]
    fn work_bath_far_from_limit_deviates_strongly() {
        // N_w = 0: pure two-jump emission channel, nowhere near the noise
        let cfg = FockConfig::new(8, 8).unwrap();
        let model = worked_model();
        let gen = Generator::work_bath(&cfg, &model, 0.5, 0.0).unwrap();
        let sd = stationary_density(&gen).unwrap();
        let c = gen.currents_from_blocks(&sd.blocks);
        let gauss_gen = Generator::gaussian(&cfg, &model).unwrap();
        let gauss = gauss_gen.currents_from_blocks(&stationary_density(&gauss_gen).unwrap().blocks);
        assert!(rel_dev(&c, &gauss) > 0.5);
    }
}
