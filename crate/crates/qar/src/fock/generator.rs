//! Master-equation generators on the truncated space: bare or dressed bath
//! dissipators combined with one of the noise variants, assembled both as a
//! dense action on arbitrary density operators and as a block-tridiagonal
//! system on the sector-diagonal subspace.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianModel, MomentState};
use crate::linalg::{expm, CMat, ONE, ZERO};
use crate::poisson::{
    dressed_frame, kick_moments, DressedFrame, DressedRateSet, PoissonNoiseSpec,
    PoissonRefrigerator,
};
use crate::thermo::{CurrentsReport, OscillatorPair};

use super::operators::{build_dressed_operators, build_mode_operators, ModeOperators};
use super::sectors::{
    add_identity, add_left_mul, add_right_mul, add_sandwich, BlockDiag, BlockTridiag, SectorSpace,
};
use super::FockConfig;

/// Which noise mechanism drives the refrigerator.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorVariant {
    /// Double-commutator dissipator −η[X,[X,·]].
    GaussianNoise { eta: f64 },
    /// Exact averaged-unitary kick map
    /// λ(∫dξ P(ξ) e^{−iξX} ρ e^{iξX} − ρ) + iλ⟨ξ⟩[X, ρ].
    PoissonKick { noise: PoissonNoiseSpec },
    /// Split form of the kick map: the ε-shift absorbed into the dressed
    /// Hamiltonian plus −η[W,[W,·]].
    PoissonDressed { epsilon: f64, eta: f64 },
    /// Finite-temperature work bath exchanging quanta through a†b / b†a.
    /// The two exchange channels carry rates 2Γ_w(N_w+1) and 2Γ_w·N_w,
    /// normalized so the N_w → ∞ singular-bath limit at fixed η = Γ_w·N_w
    /// reproduces the Gaussian white-noise generator of strength η.
    WorkBathFiniteT { gamma_w: f64, n_w: f64 },
}

impl GeneratorVariant {
    fn name(&self) -> &'static str {
        match self {
            GeneratorVariant::GaussianNoise { .. } => "gaussian-noise",
            GeneratorVariant::PoissonKick { .. } => "poisson-kick",
            GeneratorVariant::PoissonDressed { .. } => "poisson-dressed",
            GeneratorVariant::WorkBathFiniteT { .. } => "work-bath-finite-t",
        }
    }

    fn requires_dressed_baths(&self) -> bool {
        matches!(
            self,
            GeneratorVariant::PoissonKick { .. } | GeneratorVariant::PoissonDressed { .. }
        )
    }
}

/// Hot/cold dissipators in the picture matching the noise variant.
#[derive(Debug, Clone, PartialEq)]
pub enum BathSetup {
    /// Energy-relaxation channels on each bare oscillator.
    Bare {
        gamma_h: f64,
        n_h: f64,
        gamma_c: f64,
        n_c: f64,
    },
    /// Detailed-balanced channels on the dressed modes A₁, A₂ with c²/s²
    /// weights from the mixing angle.
    Dressed {
        frame: DressedFrame,
        hot: DressedRateSet,
        cold: DressedRateSet,
    },
}

impl BathSetup {
    pub fn bare_from_model(model: &GaussianModel) -> BathSetup {
        BathSetup::Bare {
            gamma_h: model.gamma_h,
            n_h: model.n_hot(),
            gamma_c: model.gamma_c,
            n_c: model.n_cold(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLabel {
    Hot,
    Cold,
    Noise,
}

#[derive(Debug, Clone)]
struct Channel {
    op: CMat,
    rate: f64,
}

#[derive(Debug, Clone)]
struct KickTerm {
    lambda: f64,
    mean_xi: f64,
    coupling: CMat,
    /// (e^{−iξ_i X}, w_i) per impulse node.
    unitaries: Vec<(CMat, f64)>,
}

#[derive(Debug, Clone)]
struct ChannelGroup {
    label: GroupLabel,
    channels: Vec<Channel>,
    kick: Option<KickTerm>,
}

/// A fully assembled generator: Schrödinger-picture action
/// dρ/dt = −i[H, ρ] + Σ_groups L_g(ρ).
#[derive(Debug, Clone)]
pub struct Generator {
    pub config: FockConfig,
    pub modes: ModeOperators,
    pub space: SectorSpace,
    /// Hamiltonian generating the unitary part.
    pub hamiltonian: CMat,
    /// System Hamiltonian used for current bookkeeping (dressed H for both
    /// Poisson pictures so their currents are directly comparable).
    pub audit_hamiltonian: CMat,
    /// SU(2) observables (bare set, or dressed set for Poisson variants).
    pub moment_ops: [CMat; 4],
    groups: Vec<ChannelGroup>,
    variant_name: &'static str,
    /// Coarse scale of the slowest dissipation, for shift/horizon choices.
    pub rate_floor: f64,
    /// Largest channel rate (plus kick rate), for tolerance scaling.
    pub rate_ceiling: f64,
}

impl Generator {
    pub fn variant_name(&self) -> &'static str {
        self.variant_name
    }

    /// Kick unitary e^{−iξX}, computed sector-by-sector (X conserves total
    /// excitation) with the scaling-and-squaring exponential.
    fn kick_unitary(space: &SectorSpace, x: &CMat, xi: f64) -> Result<CMat> {
        let mut u = CMat::zeros(x.nrows, x.ncols);
        for k in 0..space.n_sectors() {
            let xk = space.block(x, k, k);
            let uk = expm(&xk.scale(Complex64::new(0.0, -xi)))?;
            let idx = &space.sectors[k];
            for i in 0..uk.nrows {
                for j in 0..uk.ncols {
                    u[(idx[i], idx[j])] = uk[(i, j)];
                }
            }
        }
        Ok(u)
    }

    /// Schrödinger action of one group (no Hamiltonian part) on a dense ρ.
    fn apply_group_dense(&self, group: &ChannelGroup, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(rho.nrows, rho.ncols);
        for ch in &group.channels {
            let l = &ch.op;
            let ld = l.dagger();
            let ldl = ld.mul(l);
            let g = Complex64::new(ch.rate, 0.0);
            out.axpy(g, &l.mul(rho).mul(&ld));
            let half = Complex64::new(-0.5 * ch.rate, 0.0);
            out.axpy(half, &ldl.mul(rho));
            out.axpy(half, &rho.mul(&ldl));
        }
        if let Some(kick) = &group.kick {
            let lam = Complex64::new(kick.lambda, 0.0);
            for (u, w) in &kick.unitaries {
                out.axpy(lam * Complex64::new(*w, 0.0), &u.mul(rho).mul(&u.dagger()));
            }
            out.axpy(-lam, rho);
            // + iλ⟨ξ⟩ [X, ρ]
            let drift = Complex64::new(0.0, kick.lambda * kick.mean_xi);
            out.axpy(drift, &kick.coupling.commutator(rho));
        }
        out
    }

    /// Full dense action dρ/dt for an arbitrary (not necessarily
    /// sector-diagonal) density operator.
    pub fn apply_dense(&self, rho: &CMat) -> CMat {
        let mut out = self.hamiltonian.commutator(rho).scale(-crate::linalg::I);
        for group in &self.groups {
            out = out.add(&self.apply_group_dense(group, rho));
        }
        out
    }

    /// Same action restricted to the sector-diagonal subspace.
    pub fn apply_block(&self, rho: &BlockDiag) -> BlockDiag {
        let sp = &self.space;
        let n = sp.n_sectors();
        let mut out = BlockDiag::zeros(sp);
        // unitary part, sector-diagonal
        for k in 0..n {
            let hk = sp.block(&self.hamiltonian, k, k);
            let comm = hk.mul(&rho.blocks[k]).sub(&rho.blocks[k].mul(&hk));
            out.blocks[k].axpy(-crate::linalg::I, &comm);
        }
        for group in &self.groups {
            for ch in &group.channels {
                let shift = sp
                    .sector_shift(&ch.op)
                    .expect("channel operators are sector-structured");
                let g = Complex64::new(ch.rate, 0.0);
                let half = Complex64::new(-0.5 * ch.rate, 0.0);
                for k in 0..n {
                    let to = k as i64 + shift;
                    if to >= 0 && (to as usize) < n {
                        let to = to as usize;
                        let lk = sp.block(&ch.op, to, k);
                        out.blocks[to].axpy(g, &lk.mul(&rho.blocks[k]).mul(&lk.dagger()));
                    }
                    let ldl = {
                        let lk_out = sp.block(&ch.op, ((k as i64 + shift).clamp(0, n as i64 - 1)) as usize, k);
                        lk_out.dagger().mul(&lk_out)
                    };
                    out.blocks[k].axpy(half, &ldl.mul(&rho.blocks[k]));
                    out.blocks[k].axpy(half, &rho.blocks[k].mul(&ldl));
                }
            }
            if let Some(kick) = &group.kick {
                let lam = Complex64::new(kick.lambda, 0.0);
                for k in 0..n {
                    for (u, w) in &kick.unitaries {
                        let uk = sp.block(u, k, k);
                        out.blocks[k].axpy(
                            lam * Complex64::new(*w, 0.0),
                            &uk.mul(&rho.blocks[k]).mul(&uk.dagger()),
                        );
                    }
                    out.blocks[k].axpy(-lam, &rho.blocks[k]);
                    let xk = sp.block(&kick.coupling, k, k);
                    let drift = Complex64::new(0.0, kick.lambda * kick.mean_xi);
                    let comm = xk.mul(&rho.blocks[k]).sub(&rho.blocks[k].mul(&xk));
                    out.blocks[k].axpy(drift, &comm);
                }
            }
        }
        out
    }

    /// Assemble the block-tridiagonal matrix of the generator on the
    /// sector-diagonal subspace.
    pub fn assemble_block_tridiag(&self) -> Result<BlockTridiag> {
        let sp = &self.space;
        let n = sp.n_sectors();
        let sizes: Vec<usize> = (0..n).map(|k| sp.sector_size(k)).collect();
        let mut bt = BlockTridiag::zeros(&sizes);
        // unitary part
        for k in 0..n {
            let hk = sp.block(&self.hamiltonian, k, k);
            add_left_mul(&mut bt.diag[k], &hk, -crate::linalg::I);
            add_right_mul(&mut bt.diag[k], &hk, crate::linalg::I);
        }
        for group in &self.groups {
            for ch in &group.channels {
                let shift = sp.sector_shift(&ch.op)?;
                let g = Complex64::new(ch.rate, 0.0);
                let half = Complex64::new(-0.5 * ch.rate, 0.0);
                for k in 0..n {
                    let to = k as i64 + shift;
                    if to >= 0 && (to as usize) < n {
                        let to = to as usize;
                        let lk = sp.block(&ch.op, to, k);
                        let ldk = lk.dagger();
                        let target = match shift {
                            0 => &mut bt.diag[k],
                            1 => &mut bt.lower[to],
                            -1 => &mut bt.upper[to],
                            other => {
                                return Err(Error::Internal(format!(
                                    "unsupported sector shift {other}"
                                )))
                            }
                        };
                        add_sandwich(target, &lk, &ldk, g);
                        let ldl = ldk.mul(&lk);
                        add_left_mul(&mut bt.diag[k], &ldl, half);
                        add_right_mul(&mut bt.diag[k], &ldl, half);
                    } else {
                        // jump leaves the truncated space from the edge
                        // sector; only the anticommutator part remains
                        let lk_full = &ch.op;
                        let idx = &sp.sectors[k];
                        let s = idx.len();
                        let mut ldl = CMat::zeros(s, s);
                        for i in 0..s {
                            for j in 0..s {
                                let mut acc = ZERO;
                                for r in 0..lk_full.nrows {
                                    acc += lk_full[(r, idx[i])].conj() * lk_full[(r, idx[j])];
                                }
                                ldl[(i, j)] = acc;
                            }
                        }
                        add_left_mul(&mut bt.diag[k], &ldl, half);
                        add_right_mul(&mut bt.diag[k], &ldl, half);
                    }
                }
            }
            if let Some(kick) = &group.kick {
                for k in 0..n {
                    for (u, w) in &kick.unitaries {
                        let uk = sp.block(u, k, k);
                        let ukd = uk.dagger();
                        add_sandwich(
                            &mut bt.diag[k],
                            &uk,
                            &ukd,
                            Complex64::new(kick.lambda * w, 0.0),
                        );
                    }
                    add_identity(&mut bt.diag[k], Complex64::new(-kick.lambda, 0.0));
                    let xk = sp.block(&kick.coupling, k, k);
                    let drift = Complex64::new(0.0, kick.lambda * kick.mean_xi);
                    add_left_mul(&mut bt.diag[k], &xk, drift);
                    add_right_mul(&mut bt.diag[k], &xk, -drift);
                }
            }
        }
        Ok(bt)
    }

    /// Schrödinger action of one group on a sector-diagonal state.
    fn apply_group_blocks(&self, group: &ChannelGroup, rho: &BlockDiag) -> BlockDiag {
        let sp = &self.space;
        let n = sp.n_sectors();
        let mut out = BlockDiag::zeros(sp);
        for ch in &group.channels {
            let shift = sp
                .sector_shift(&ch.op)
                .expect("channel operators are sector-structured");
            let g = Complex64::new(ch.rate, 0.0);
            let half = Complex64::new(-0.5 * ch.rate, 0.0);
            for k in 0..n {
                let to = k as i64 + shift;
                if to >= 0 && (to as usize) < n {
                    let to = to as usize;
                    let lk = sp.block(&ch.op, to, k);
                    out.blocks[to].axpy(g, &lk.mul(&rho.blocks[k]).mul(&lk.dagger()));
                }
                // L†L restricted to sector k, including flux that leaves the
                // truncated space at the edge sectors
                let idx = &sp.sectors[k];
                let s = idx.len();
                let mut ldl = CMat::zeros(s, s);
                for i in 0..s {
                    for j in 0..s {
                        let mut acc = ZERO;
                        for r in 0..ch.op.nrows {
                            acc += ch.op[(r, idx[i])].conj() * ch.op[(r, idx[j])];
                        }
                        ldl[(i, j)] = acc;
                    }
                }
                out.blocks[k].axpy(half, &ldl.mul(&rho.blocks[k]));
                out.blocks[k].axpy(half, &rho.blocks[k].mul(&ldl));
            }
        }
        if let Some(kick) = &group.kick {
            let lam = Complex64::new(kick.lambda, 0.0);
            for k in 0..n {
                for (u, w) in &kick.unitaries {
                    let uk = sp.block(u, k, k);
                    out.blocks[k].axpy(
                        lam * Complex64::new(*w, 0.0),
                        &uk.mul(&rho.blocks[k]).mul(&uk.dagger()),
                    );
                }
                out.blocks[k].axpy(-lam, &rho.blocks[k]);
                let xk = sp.block(&kick.coupling, k, k);
                let drift = Complex64::new(0.0, kick.lambda * kick.mean_xi);
                let comm = xk.mul(&rho.blocks[k]).sub(&rho.blocks[k].mul(&xk));
                out.blocks[k].axpy(drift, &comm);
            }
        }
        out
    }

    /// Per-group currents J_g = tr(L_g(ρ)·H_audit) for a sector-diagonal ρ.
    pub fn currents_from_blocks(&self, rho: &BlockDiag) -> CurrentsReport {
        let sp = &self.space;
        let mut j = [0.0f64; 3];
        for group in &self.groups {
            let action = self.apply_group_blocks(group, rho);
            let val = action.trace_with(sp, &self.audit_hamiltonian).re;
            match group.label {
                GroupLabel::Hot => j[0] += val,
                GroupLabel::Cold => j[1] += val,
                GroupLabel::Noise => j[2] += val,
            }
        }
        CurrentsReport::new(j[0], j[1], j[2])
    }

    /// SU(2) moments of a sector-diagonal state.
    pub fn moments_from_blocks(&self, rho: &BlockDiag) -> MomentState {
        let sp = &self.space;
        let m: Vec<f64> = self
            .moment_ops
            .iter()
            .map(|op| rho.trace_with(sp, op).re)
            .collect();
        MomentState { x: m[0], y: m[1], z: m[2], n: m[3] }
    }

    /// Time derivatives of the SU(2) expectations in an arbitrary state:
    /// d⟨O⟩/dt = tr(L(ρ)·O). This is the moment-closure cross-check surface.
    pub fn moment_derivatives(&self, rho: &CMat) -> [f64; 4] {
        let drho = self.apply_dense(rho);
        let mut out = [0.0; 4];
        for (slot, op) in out.iter_mut().zip(&self.moment_ops) {
            *slot = drho.mul(op).trace().re;
        }
        out
    }

    /// Population of the highest retained level of each mode.
    pub fn edge_populations(&self, rho: &BlockDiag) -> (f64, f64) {
        let sp = &self.space;
        let dense = rho.to_dense(sp);
        let (la, lb) = (sp.levels_a, sp.levels_b);
        let mut pa = 0.0;
        let mut pb = 0.0;
        for nb in 0..lb {
            pa += dense[((la - 1) * lb + nb, (la - 1) * lb + nb)].re;
        }
        for na in 0..la {
            pb += dense[(na * lb + (lb - 1), na * lb + (lb - 1))].re;
        }
        (pa, pb)
    }
}

/// Build a generator from a noise variant and matching bath setup.
///
/// Bath form must match the variant's Hamiltonian picture: bare baths for
/// `GaussianNoise`/`WorkBathFiniteT`, dressed baths for the two Poisson
/// pictures.
pub fn build_generator(
    config: &FockConfig,
    pair: &OscillatorPair,
    variant: &GeneratorVariant,
    baths: &BathSetup,
) -> Result<Generator> {
    config.validate()?;
    let modes = build_mode_operators(config)?;
    let space = SectorSpace::new(config.levels_a, config.levels_b);

    let mut groups: Vec<ChannelGroup> = Vec::new();
    let hamiltonian;
    let audit_hamiltonian;
    let moment_ops;

    match (variant.requires_dressed_baths(), baths) {
        (false, BathSetup::Bare { gamma_h, n_h, gamma_c, n_c }) => {
            for (label, op_down, op_up, gamma, occ) in [
                (GroupLabel::Hot, &modes.a, &modes.adag, *gamma_h, *n_h),
                (GroupLabel::Cold, &modes.b, &modes.bdag, *gamma_c, *n_c),
            ] {
                groups.push(ChannelGroup {
                    label,
                    channels: vec![
                        Channel { op: op_down.clone(), rate: gamma * (occ + 1.0) },
                        Channel { op: op_up.clone(), rate: gamma * occ },
                    ],
                    kick: None,
                });
            }
            hamiltonian = modes.bare_hamiltonian(pair.omega_h, pair.omega_c);
            audit_hamiltonian = hamiltonian.clone();
            moment_ops = [modes.x.clone(), modes.y.clone(), modes.z.clone(), modes.n_tot.clone()];
        }
        (true, BathSetup::Dressed { frame, hot, cold }) => {
            let dressed = build_dressed_operators(&modes, frame);
            let c2 = frame.cos_sq_theta;
            let s2 = 1.0 - c2;
            for (label, w1, w2, rates) in [
                (GroupLabel::Hot, c2, s2, hot),
                (GroupLabel::Cold, s2, c2, cold),
            ] {
                groups.push(ChannelGroup {
                    label,
                    channels: vec![
                        Channel { op: dressed.a1.clone(), rate: w1 * rates.gamma2 },
                        Channel { op: dressed.a1.dagger(), rate: w1 * rates.gamma1 },
                        Channel { op: dressed.a2.clone(), rate: w2 * rates.gamma4 },
                        Channel { op: dressed.a2.dagger(), rate: w2 * rates.gamma3 },
                    ],
                    kick: None,
                });
            }
            audit_hamiltonian = dressed.hamiltonian.clone();
            moment_ops = [
                dressed.x.clone(),
                dressed.y.clone(),
                dressed.z.clone(),
                dressed.n_tot.clone(),
            ];
            match variant {
                GeneratorVariant::PoissonKick { .. } => {
                    hamiltonian = modes.bare_hamiltonian(pair.omega_h, pair.omega_c);
                }
                _ => hamiltonian = dressed.hamiltonian.clone(),
            }
        }
        _ => {
            return Err(Error::invalid(
                "baths",
                format!(
                    "bath form does not match the {} picture (bare baths go with \
                     gaussian-noise/work-bath variants, dressed baths with poisson variants)",
                    variant.name()
                ),
            ));
        }
    }

    // noise group
    match variant {
        GeneratorVariant::GaussianNoise { eta } => {
            if !(*eta >= 0.0) {
                return Err(Error::invalid("eta", format!("must be ≥ 0, got {eta}")));
            }
            // −η[X,[X,ρ]] = 2η (XρX − ½{X²,ρ}): a Hermitian jump channel.
            groups.push(ChannelGroup {
                label: GroupLabel::Noise,
                channels: vec![Channel { op: modes.x.clone(), rate: 2.0 * eta }],
                kick: None,
            });
        }
        GeneratorVariant::PoissonDressed { epsilon, eta } => {
            if !(*eta >= 0.0) {
                return Err(Error::invalid("eta", format!("must be ≥ 0, got {eta}")));
            }
            let BathSetup::Dressed { frame, .. } = baths else { unreachable!() };
            check_frame_consistency(pair, *epsilon, frame)?;
            let dressed = build_dressed_operators(&modes, frame);
            groups.push(ChannelGroup {
                label: GroupLabel::Noise,
                channels: vec![Channel { op: dressed.w.clone(), rate: 2.0 * eta }],
                kick: None,
            });
        }
        GeneratorVariant::PoissonKick { noise } => {
            let BathSetup::Dressed { frame, .. } = baths else { unreachable!() };
            let km = kick_moments(noise);
            check_frame_consistency(pair, km.epsilon, frame)?;
            let mut unitaries = Vec::with_capacity(noise.impulses.len());
            for node in &noise.impulses {
                let u = Generator::kick_unitary(&space, &modes.x, node.xi)?;
                unitaries.push((u, node.weight));
            }
            groups.push(ChannelGroup {
                label: GroupLabel::Noise,
                channels: Vec::new(),
                kick: Some(KickTerm {
                    lambda: noise.lambda_rate,
                    mean_xi: noise.mean_xi(),
                    coupling: modes.x.clone(),
                    unitaries,
                }),
            });
        }
        GeneratorVariant::WorkBathFiniteT { gamma_w, n_w } => {
            if !(*gamma_w > 0.0) {
                return Err(Error::invalid("gamma_w", format!("must be > 0, got {gamma_w}")));
            }
            if !(*n_w >= 0.0) {
                return Err(Error::invalid("n_w", format!("must be ≥ 0, got {n_w}")));
            }
            let down = modes.bdag.mul(&modes.a); // b†a, releases ω_h − ω_c
            let up = modes.adag.mul(&modes.b); // a†b, absorbs ω_h − ω_c
            groups.push(ChannelGroup {
                label: GroupLabel::Noise,
                channels: vec![
                    Channel { op: down, rate: 2.0 * gamma_w * (n_w + 1.0) },
                    Channel { op: up, rate: 2.0 * gamma_w * n_w },
                ],
                kick: None,
            });
        }
    }

    // drop zero-rate channels, collect rate scales
    let mut rate_floor = f64::INFINITY;
    let mut rate_ceiling: f64 = 0.0;
    for group in &mut groups {
        group.channels.retain(|c| c.rate > 0.0);
        let total: f64 = group.channels.iter().map(|c| c.rate).sum();
        let kick_rate = group.kick.as_ref().map(|k| k.lambda).unwrap_or(0.0);
        let group_rate = total + kick_rate;
        if group_rate > 0.0 {
            rate_floor = rate_floor.min(group_rate);
            rate_ceiling = rate_ceiling.max(group_rate);
        }
    }
    if !rate_floor.is_finite() {
        rate_floor = 0.0;
    }

    Ok(Generator {
        config: *config,
        modes,
        space,
        hamiltonian,
        audit_hamiltonian,
        moment_ops,
        groups,
        variant_name: variant.name(),
        rate_floor,
        rate_ceiling,
    })
}

/// The dressed frame handed in with the baths must be the one generated by
/// this ε; composing inconsistent pieces would silently break detailed
/// balance.
fn check_frame_consistency(pair: &OscillatorPair, epsilon: f64, frame: &DressedFrame) -> Result<()> {
    let expected = dressed_frame(pair, epsilon)?;
    let scale = frame.omega_plus.abs().max(1.0);
    if (expected.omega_plus - frame.omega_plus).abs() > 1e-9 * scale
        || (expected.omega_minus - frame.omega_minus).abs() > 1e-9 * scale
    {
        return Err(Error::invalid(
            "frame",
            format!(
                "dressed frame (Ω+ = {}, Ω− = {}) does not match ε = {epsilon} \
                 (expected Ω+ = {}, Ω− = {})",
                frame.omega_plus, frame.omega_minus, expected.omega_plus, expected.omega_minus
            ),
        ));
    }
    Ok(())
}

/// Convenience builders wiring the model structs to the matching variants.
impl Generator {
    pub fn gaussian(config: &FockConfig, model: &GaussianModel) -> Result<Generator> {
        build_generator(
            config,
            &model.pair,
            &GeneratorVariant::GaussianNoise { eta: model.eta },
            &BathSetup::bare_from_model(model),
        )
    }

    /// Work-bath variant sharing `model`'s pair and bare baths (the model's
    /// η is not used; the work bath replaces the noise group).
    pub fn work_bath(
        config: &FockConfig,
        model: &GaussianModel,
        gamma_w: f64,
        n_w: f64,
    ) -> Result<Generator> {
        build_generator(
            config,
            &model.pair,
            &GeneratorVariant::WorkBathFiniteT { gamma_w, n_w },
            &BathSetup::bare_from_model(model),
        )
    }

    pub fn poisson_dressed(config: &FockConfig, r: &PoissonRefrigerator) -> Result<Generator> {
        build_generator(
            config,
            &r.pair,
            &GeneratorVariant::PoissonDressed { epsilon: r.kick.epsilon, eta: r.kick.eta },
            &BathSetup::Dressed { frame: r.frame, hot: r.hot, cold: r.cold },
        )
    }

    pub fn poisson_kick(config: &FockConfig, r: &PoissonRefrigerator) -> Result<Generator> {
        build_generator(
            config,
            &r.pair,
            &GeneratorVariant::PoissonKick { noise: r.noise.clone() },
            &BathSetup::Dressed { frame: r.frame, hot: r.hot, cold: r.cold },
        )
    }
}

/// Dense D²×D² matrix of the full generator (reference path for small
/// dimensions; used to validate the block-tridiagonal assembly).
pub fn dense_superoperator(gen: &Generator) -> CMat {
    let d = gen.modes.dim;
    let mut sup = CMat::zeros(d * d, d * d);
    // column-by-column through the dense action on matrix units
    let mut unit = CMat::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            unit[(k, l)] = ONE;
            let img = gen.apply_dense(&unit);
            unit[(k, l)] = ZERO;
            for i in 0..d {
                for j in 0..d {
                    sup[(i * d + j, k * d + l)] = img[(i, j)];
                }
            }
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I as IM;
    use crate::poisson::ZetaMode;
    use crate::thermo::{BathSpec, OscillatorPair};
    use approx::assert_relative_eq;

    fn small_gaussian_model() -> GaussianModel {
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let hot = BathSpec::hot(2.0 / (1.0 + 1.0 / 0.25f64).ln(), 1, 1.0).unwrap();
        let cold = BathSpec::cold(1.0 / (1.0 + 1.0 / 0.5f64).ln(), 1, 1.0).unwrap();
        GaussianModel::with_rates(pair, hot, cold, 1.0, 1.0, 0.5).unwrap()
    }

    fn random_density(dim: usize, seed: u64) -> CMat {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g = CMat::from_fn(dim, dim, |_, _| Complex64::new(next(), next()));
        let rho = g.mul(&g.dagger());
        let tr = rho.trace().re;
        rho.scale(Complex64::new(1.0 / tr, 0.0))
    }

    #[test]
    fn generator_annihilates_trace() {
        let cfg = FockConfig::new(4, 4).unwrap();
        let model = small_gaussian_model();
        let gen = Generator::gaussian(&cfg, &model).unwrap();
        for seed in 0..5 {
            let rho = random_density(16, seed + 1);
            let drho = gen.apply_dense(&rho);
            assert!(drho.trace().norm() < 1e-12, "trace not preserved: {}", drho.trace());
            // Hermiticity preserved for Hermitian input
            assert!(drho.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn gaussian_noise_is_unital() {
        // the double commutator annihilates the maximally mixed state
        let cfg = FockConfig::new(4, 4).unwrap();
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let mut model = small_gaussian_model();
        model.gamma_h = 1e-300; // disable baths in effect
        model.gamma_c = 1e-300;
        let gen = build_generator(
            &cfg,
            &pair,
            &GeneratorVariant::GaussianNoise { eta: 0.7 },
            &BathSetup::Bare { gamma_h: 1e-300, n_h: 0.0, gamma_c: 1e-300, n_c: 0.0 },
        )
        .unwrap();
        let mixed = CMat::eye(16).scale(Complex64::new(1.0 / 16.0, 0.0));
        let out = gen.apply_dense(&mixed);
        assert!(out.frobenius_norm() < 1e-12);
    }

    #[test]
    fn block_apply_matches_dense_apply() {
        let cfg = FockConfig::new(4, 3).unwrap();
        let model = small_gaussian_model();
        let gen = Generator::gaussian(&cfg, &model).unwrap();
        // sector-diagonal random state
        let dense = random_density(12, 77);
        let blocks = BlockDiag::from_dense(&gen.space, &dense);
        let via_block = gen.apply_block(&blocks).to_dense(&gen.space);
        let via_dense = gen.apply_dense(&blocks.to_dense(&gen.space));
        // dense action of a sector-diagonal state stays sector-diagonal
        assert!(via_block.sub(&via_dense).frobenius_norm() < 1e-12);
    }

    #[test]
    fn tridiag_assembly_matches_dense_superoperator() {
        for (variant_id, levels) in [(0usize, (4usize, 3usize)), (1, (4, 4)), (2, (4, 4)), (3, (4, 3))] {
            let pair = OscillatorPair::new(2.0, 1.1).unwrap();
            let gen = match variant_id {
                0 => build_generator(
                    &FockConfig::new(levels.0, levels.1).unwrap(),
                    &pair,
                    &GeneratorVariant::GaussianNoise { eta: 0.4 },
                    &BathSetup::Bare { gamma_h: 0.8, n_h: 0.3, gamma_c: 0.5, n_c: 0.6 },
                )
                .unwrap(),
                3 => build_generator(
                    &FockConfig::new(levels.0, levels.1).unwrap(),
                    &pair,
                    &GeneratorVariant::WorkBathFiniteT { gamma_w: 0.25, n_w: 2.0 },
                    &BathSetup::Bare { gamma_h: 0.8, n_h: 0.3, gamma_c: 0.5, n_c: 0.6 },
                )
                .unwrap(),
                _ => {
                    let noise = PoissonNoiseSpec::delta(0.6, 1.1).unwrap();
                    let r = PoissonRefrigerator::new(
                        pair,
                        BathSpec::hot(1.5, 1, 0.3).unwrap(),
                        BathSpec::cold(0.7, 1, 0.3).unwrap(),
                        noise,
                        ZetaMode::Spectral,
                    )
                    .unwrap();
                    let cfg = FockConfig::new(levels.0, levels.1).unwrap();
                    if variant_id == 1 {
                        Generator::poisson_kick(&cfg, &r).unwrap()
                    } else {
                        Generator::poisson_dressed(&cfg, &r).unwrap()
                    }
                }
            };
            let bt = gen.assemble_block_tridiag().unwrap();
            // compare action on a random sector-diagonal state
            let dense = random_density(gen.modes.dim, 1234 + variant_id as u64);
            let blocks = BlockDiag::from_dense(&gen.space, &dense);
            let x: Vec<Vec<Complex64>> = blocks.blocks.iter().map(|b| b.data.clone()).collect();
            let via_bt = bt.apply(&x);
            let direct = gen.apply_block(&blocks);
            for (k, blk) in direct.blocks.iter().enumerate() {
                for (idx, v) in blk.data.iter().enumerate() {
                    let diff = (via_bt[k][idx] - v).norm();
                    assert!(
                        diff < 1e-11,
                        "variant {variant_id}, sector {k}, entry {idx}: {diff}"
                    );
                }
            }
        }
    }

    #[test]
    fn kick_unitary_is_unitary_and_sector_diagonal() {
        let cfg = FockConfig::new(5, 5).unwrap();
        let modes = build_mode_operators(&cfg).unwrap();
        let space = SectorSpace::new(5, 5);
        let u = Generator::kick_unitary(&space, &modes.x, 0.9).unwrap();
        let udu = u.dagger().mul(&u);
        assert!(udu.sub(&CMat::eye(25)).frobenius_norm() < 1e-11);
        for r in 0..25 {
            for c in 0..25 {
                if space.sector_of[r] != space.sector_of[c] {
                    assert_eq!(u[(r, c)], ZERO);
                }
            }
        }
    }

    #[test]
    fn single_bath_gibbs_state_is_stationary_dense() {
        // hot bath alone: the Gibbs state of ω_h a†a at T_h is a fixed point
        let cfg = FockConfig::new(8, 2).unwrap();
        let pair = OscillatorPair::new(1.3, 1.0).unwrap();
        let n_h = 0.4;
        let gen = build_generator(
            &cfg,
            &pair,
            &GeneratorVariant::GaussianNoise { eta: 0.0 },
            &BathSetup::Bare { gamma_h: 0.9, n_h, gamma_c: 1e-300, n_c: 0.0 },
        )
        .unwrap();
        // thermal state on mode a (q = N/(N+1)), ground state on mode b
        let q = n_h / (1.0 + n_h);
        let mut rho = CMat::zeros(16, 16);
        let norm: f64 = (0..8).map(|n| q.powi(n)).sum();
        for n in 0..8usize {
            rho[(n * 2, n * 2)] = Complex64::new(q.powi(n as i32) / norm, 0.0);
        }
        let drho = gen.apply_dense(&rho);
        // stationary up to the truncation edge (the top thermal weight leaks)
        assert!(drho.frobenius_norm() < 1e-3 * q.powi(7));
    }

    #[test]
    fn mismatched_bath_form_rejected() {
        let cfg = FockConfig::new(3, 3).unwrap();
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let err = build_generator(
            &cfg,
            &pair,
            &GeneratorVariant::GaussianNoise { eta: 0.1 },
            &BathSetup::Dressed {
                frame: dressed_frame(&pair, 0.0).unwrap(),
                hot: DressedRateSet::from_constant_zeta(&dressed_frame(&pair, 0.0).unwrap(), 1.0, 0.1).unwrap(),
                cold: DressedRateSet::from_constant_zeta(&dressed_frame(&pair, 0.0).unwrap(), 0.5, 0.1).unwrap(),
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("bath form"));
    }

    #[test]
    fn moment_derivative_sign_convention() {
        // pure unitary evolution: d⟨X⟩/dt = (ω_h−ω_c)⟨Y⟩ in the bare model
        let cfg = FockConfig::new(4, 4).unwrap();
        let pair = OscillatorPair::new(2.0, 1.0).unwrap();
        let gen = build_generator(
            &cfg,
            &pair,
            &GeneratorVariant::GaussianNoise { eta: 0.0 },
            &BathSetup::Bare { gamma_h: 1e-300, n_h: 0.0, gamma_c: 1e-300, n_c: 0.0 },
        )
        .unwrap();
        // state with nonzero ⟨Y⟩: (|10⟩ + i|01⟩)/√2
        let dim = 16;
        let mut psi = CMat::zeros(dim, 1);
        psi[(4, 0)] = Complex64::new(1.0 / 2f64.sqrt(), 0.0); // |1,0⟩ at index 1*4+0
        psi[(1, 0)] = IM * Complex64::new(1.0 / 2f64.sqrt(), 0.0); // |0,1⟩
        let rho = psi.mul(&psi.dagger());
        let y = gen.moment_ops[1].mul(&rho).trace().re;
        let derivs = gen.moment_derivatives(&rho);
        assert_relative_eq!(derivs[0], (2.0 - 1.0) * y, epsilon = 1e-12);
    }
}
