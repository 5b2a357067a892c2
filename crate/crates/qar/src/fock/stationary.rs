//! Stationary states of the assembled generators.
//!
//! Primary path: shifted inverse iteration on the block-tridiagonal form of
//! the generator (a null-space solve — the kernel is the steady state).
//! Fallback: backward-Euler long-time propagation with the same factorized
//! solver, which is L-stable and untroubled by the rate spreads that make
//! these generators stiff. Both paths end in the same certification:
//! hermitize, normalize the trace, verify the residual with an independent
//! application of the generator, and bound the minimum eigenvalue.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{min_eig_lower_bound, CMat, ONE};

use super::generator::Generator;
use super::sectors::{BlockDiag, BlockTridiagLu};

/// Tunables for the stationary solve. The defaults serve every model in the
/// crate; tests override only to probe edge behaviour.
#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    /// Inverse-iteration shift as a fraction of the slowest group rate.
    pub shift_factor: f64,
    pub max_iterations: usize,
    /// Residual acceptance: ‖L(ρ)‖_F ≤ residual_tol · max|L| entries.
    pub residual_tol: f64,
    /// Two independent starts must agree to this Frobenius distance, or the
    /// kernel is declared degenerate.
    pub degeneracy_tol: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            shift_factor: 1e-3,
            max_iterations: 40,
            residual_tol: 1e-8,
            degeneracy_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    NullSpace,
    Propagation,
}

/// A certified stationary density operator.
#[derive(Debug, Clone)]
pub struct StationaryDensity {
    pub blocks: BlockDiag,
    /// Dense form of the state.
    pub rho: CMat,
    /// ‖L(ρ)‖_F from re-applying the generator to the final state.
    pub residual_norm: f64,
    /// Max-entry scale of the generator, the residual's reference.
    pub residual_scale: f64,
    /// Certified lower bound on the minimum eigenvalue.
    pub min_eigenvalue: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

impl StationaryDensity {
    pub fn trace_defect(&self) -> f64 {
        (self.rho.trace() - ONE).norm()
    }
}

fn block_norm(x: &[Vec<Complex64>]) -> f64 {
    x.iter()
        .flat_map(|v| v.iter())
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn to_blockdiag(gen: &Generator, x: &[Vec<Complex64>]) -> BlockDiag {
    let mut bd = BlockDiag::zeros(&gen.space);
    for (k, v) in x.iter().enumerate() {
        let s = gen.space.sector_size(k);
        bd.blocks[k] = CMat {
            nrows: s,
            ncols: s,
            data: v.clone(),
        };
    }
    bd
}

fn normalize_density(gen: &Generator, x: &[Vec<Complex64>]) -> Result<BlockDiag> {
    let mut bd = to_blockdiag(gen, x);
    bd.hermitize_mut();
    let tr = bd.trace().re;
    if tr.abs() < 1e-300 {
        return Err(Error::NonConvergence(
            "candidate stationary state has vanishing trace".into(),
        ));
    }
    bd.scale_mut(Complex64::new(1.0 / tr, 0.0));
    Ok(bd)
}

/// Certified minimum eigenvalue over the sector blocks (the spectrum of a
/// sector-diagonal ρ is the union of its block spectra).
fn min_eig_blocks(bd: &BlockDiag) -> f64 {
    bd.blocks
        .iter()
        .map(|b| min_eig_lower_bound(b, 1e-13))
        .fold(f64::INFINITY, f64::min)
}

struct IterationOutcome {
    state: BlockDiag,
    residual: f64,
    iterations: usize,
}

fn run_inverse_iteration(
    gen: &Generator,
    lu: &BlockTridiagLu,
    bt_apply: &super::sectors::BlockTridiag,
    start: Vec<Vec<Complex64>>,
    opts: &StationaryOptions,
    scale: f64,
) -> Result<IterationOutcome> {
    let mut x = start;
    let nrm = block_norm(&x);
    for v in x.iter_mut().flat_map(|v| v.iter_mut()) {
        *v /= nrm;
    }
    let mut best: Option<(BlockDiag, f64)> = None;
    let mut iterations = 0;
    let mut stalls = 0;
    for it in 1..=opts.max_iterations {
        iterations = it;
        x = lu.solve(&x);
        let nrm = block_norm(&x);
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::NonConvergence(
                "inverse iteration produced a non-finite iterate".into(),
            ));
        }
        for v in x.iter_mut().flat_map(|v| v.iter_mut()) {
            *v /= nrm;
        }
        let candidate = normalize_density(gen, &x)?;
        let vecs: Vec<Vec<Complex64>> = candidate.blocks.iter().map(|b| b.data.clone()).collect();
        let resid = block_norm(&bt_apply.apply(&vecs));
        let improved = match &best {
            Some((_, b)) => resid < *b * 0.9,
            None => true,
        };
        if improved {
            stalls = 0;
            best = Some((candidate, resid));
        } else {
            stalls += 1;
        }
        if resid <= 1e-14 * scale {
            break; // machine floor
        }
        if stalls >= 2 && it > 3 {
            break; // rounding floor reached
        }
    }
    let (mut state, mut residual) = best.expect("at least one iterate");
    // Iterative refinement with the same shifted factor: solving
    // (M − δ)c = Mρ leaves L(ρ − c) = −δc, cutting the non-kernel error by
    // ~δ/gap per round until the solve's own rounding floor.
    for _ in 0..4 {
        if residual <= 1e-15 * scale {
            break;
        }
        let vecs: Vec<Vec<Complex64>> = state.blocks.iter().map(|b| b.data.clone()).collect();
        let r = bt_apply.apply(&vecs);
        let c = lu.solve(&r);
        let corrected: Vec<Vec<Complex64>> = vecs
            .iter()
            .zip(&c)
            .map(|(v, cv)| v.iter().zip(cv).map(|(a, b)| a - b).collect())
            .collect();
        let candidate = match normalize_density(gen, &corrected) {
            Ok(c) => c,
            Err(_) => break,
        };
        let cand_vecs: Vec<Vec<Complex64>> =
            candidate.blocks.iter().map(|b| b.data.clone()).collect();
        let cand_resid = block_norm(&bt_apply.apply(&cand_vecs));
        if cand_resid < residual {
            state = candidate;
            residual = cand_resid;
        } else {
            break;
        }
    }
    Ok(IterationOutcome {
        state,
        residual,
        iterations,
    })
}

/// Deterministic pseudo-random start for the degeneracy probe.
fn probe_start(gen: &Generator) -> Vec<Vec<Complex64>> {
    let mut seed = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    (0..gen.space.n_sectors())
        .map(|k| {
            let s = gen.space.sector_size(k);
            let g = CMat::from_fn(s, s, |_, _| Complex64::new(next(), next()));
            g.mul(&g.dagger()).data
        })
        .collect()
}

fn mixed_start(gen: &Generator) -> Vec<Vec<Complex64>> {
    (0..gen.space.n_sectors())
        .map(|k| {
            let s = gen.space.sector_size(k);
            CMat::eye(s).data
        })
        .collect()
}

/// Null-space solve with trace normalization. Detects degenerate kernels by
/// converging from two independent starts; falls back to long-time
/// propagation when the iteration cannot certify its residual.
pub fn stationary_density(gen: &Generator) -> Result<StationaryDensity> {
    stationary_density_with(gen, &StationaryOptions::default())
}

pub fn stationary_density_with(
    gen: &Generator,
    opts: &StationaryOptions,
) -> Result<StationaryDensity> {
    if gen.rate_floor <= 0.0 {
        return Err(Error::DegenerateKernel(
            "generator has no dissipative channels; every density operator commuting \
             with the Hamiltonian is stationary"
                .into(),
        ));
    }
    let bt = gen.assemble_block_tridiag()?;
    let scale = bt.max_abs();

    let mut shift = opts.shift_factor * gen.rate_floor;
    let mut last_err: Option<Error> = None;
    for _attempt in 0..3 {
        let mut shifted = bt.clone();
        shifted.add_shift(Complex64::new(-shift, 0.0));
        let lu = match shifted.factor() {
            Ok(lu) => lu,
            Err(e) => {
                last_err = Some(e);
                shift *= 1e-2;
                continue;
            }
        };
        let main = run_inverse_iteration(gen, &lu, &bt, mixed_start(gen), opts, scale)?;
        if main.residual > opts.residual_tol * scale {
            last_err = Some(Error::NonConvergence(format!(
                "inverse iteration residual {:.3e} above {:.3e}",
                main.residual,
                opts.residual_tol * scale
            )));
            shift *= 1e-2;
            continue;
        }
        // degeneracy probe from an independent start
        let probe = run_inverse_iteration(gen, &lu, &bt, probe_start(gen), opts, scale)?;
        let dist = main.state.sub(&probe.state).frobenius_norm();
        if probe.residual <= opts.residual_tol * scale && dist > opts.degeneracy_tol {
            return Err(Error::DegenerateKernel(format!(
                "two converged stationary candidates differ by ‖Δρ‖ = {dist:.3e}"
            )));
        }
        let rho = main.state.to_dense(&gen.space);
        let min_eig = min_eig_blocks(&main.state);
        return Ok(StationaryDensity {
            blocks: main.state,
            rho,
            residual_norm: main.residual,
            residual_scale: scale,
            min_eigenvalue: min_eig,
            iterations: main.iterations,
            method: SolveMethod::NullSpace,
        });
    }
    // primary path could not certify; try propagation before giving up
    match propagate_to_stationary(gen, opts) {
        Ok(sd) => Ok(sd),
        Err(prop_err) => Err(last_err.unwrap_or(prop_err)),
    }
}

/// Long-time propagation fallback: backward Euler ρ_{k+1} = (1 − hL)⁻¹ ρ_k
/// until the iterates stop moving, integrating at least 20 estimated
/// relaxation times of the slowest group rate.
pub fn propagate_to_stationary(
    gen: &Generator,
    opts: &StationaryOptions,
) -> Result<StationaryDensity> {
    if gen.rate_floor <= 0.0 {
        return Err(Error::DegenerateKernel(
            "generator has no dissipative channels".into(),
        ));
    }
    let bt = gen.assemble_block_tridiag()?;
    let scale = bt.max_abs();
    let tau_slow = 1.0 / gen.rate_floor;
    let h = 0.5 * tau_slow;
    let horizon = 20.0 * tau_slow;

    // I − h·L
    let mut sys = bt.clone();
    for blocks in [&mut sys.diag, &mut sys.lower, &mut sys.upper] {
        for b in blocks.iter_mut() {
            for v in &mut b.data {
                *v *= Complex64::new(-h, 0.0);
            }
        }
    }
    sys.add_shift(ONE);
    let lu = sys.factor()?;

    let mut x = mixed_start(gen);
    let tr: f64 = gen.modes.dim as f64;
    for v in x.iter_mut().flat_map(|v| v.iter_mut()) {
        *v /= tr;
    }
    let mut t = 0.0;
    let mut steps = 0usize;
    let max_steps = 2000usize;
    loop {
        let xn = lu.solve(&x);
        let state = normalize_density(gen, &xn)?;
        let diff = state
            .sub(&normalize_density(gen, &x)?)
            .frobenius_norm();
        x = state.blocks.iter().map(|b| b.data.clone()).collect();
        t += h;
        steps += 1;
        if (t >= horizon && diff < 1e-13) || steps >= max_steps {
            if steps >= max_steps && diff >= 1e-10 {
                return Err(Error::NonConvergence(format!(
                    "propagation still moving after {steps} steps (Δ = {diff:.3e})"
                )));
            }
            break;
        }
    }
    let state = to_blockdiag(gen, &x);
    let vecs: Vec<Vec<Complex64>> = state.blocks.iter().map(|b| b.data.clone()).collect();
    let residual = block_norm(&bt.apply(&vecs));
    if residual > opts.residual_tol * scale {
        return Err(Error::NonConvergence(format!(
            "propagation residual {residual:.3e} above {:.3e}",
            opts.residual_tol * scale
        )));
    }
    let rho = state.to_dense(&gen.space);
    let min_eig = min_eig_blocks(&state);
    Ok(StationaryDensity {
        blocks: state,
        rho,
        residual_norm: residual,
        residual_scale: scale,
        min_eigenvalue: min_eig,
        iterations: steps,
        method: SolveMethod::Propagation,
    })
}
