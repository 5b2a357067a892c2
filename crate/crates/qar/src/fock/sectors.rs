//! Total-excitation sector structure of the two-mode space and a
//! block-tridiagonal representation of the master-equation generator on the
//! sector-diagonal subspace.
//!
//! Every Lindblad operator used here either conserves n_a + n_b (swap and
//! kick couplings, number operators) or shifts it by exactly one (single
//! ladder operators), so the generator maps the subspace of density
//! operators that are block diagonal in total excitation into itself, and on
//! that subspace it only couples neighbouring sectors. Steady states live in
//! this subspace; the stationary solve exploits the structure and the result
//! is certified afterwards by applying the generator directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, Lu, ZERO};

pub type C64 = Complex64;

/// Index bookkeeping for sectors of constant n_a + n_b.
#[derive(Debug, Clone)]
pub struct SectorSpace {
    pub levels_a: usize,
    pub levels_b: usize,
    pub dim: usize,
    /// sectors[k] = ordered global indices of basis states with n_a+n_b = k.
    pub sectors: Vec<Vec<usize>>,
    pub sector_of: Vec<usize>,
    pub pos_in: Vec<usize>,
}

impl SectorSpace {
    pub fn new(levels_a: usize, levels_b: usize) -> Self {
        let dim = levels_a * levels_b;
        let n_sectors = levels_a + levels_b - 1;
        let mut sectors = vec![Vec::new(); n_sectors];
        let mut sector_of = vec![0; dim];
        let mut pos_in = vec![0; dim];
        for na in 0..levels_a {
            for nb in 0..levels_b {
                let idx = na * levels_b + nb;
                let k = na + nb;
                sector_of[idx] = k;
                pos_in[idx] = sectors[k].len();
                sectors[k].push(idx);
            }
        }
        SectorSpace {
            levels_a,
            levels_b,
            dim,
            sectors,
            sector_of,
            pos_in,
        }
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn sector_size(&self, k: usize) -> usize {
        self.sectors[k].len()
    }

    /// Restriction of `op` to the map sector `from` → sector `to`.
    pub fn block(&self, op: &CMat, to: usize, from: usize) -> CMat {
        let rows = &self.sectors[to];
        let cols = &self.sectors[from];
        CMat::from_fn(rows.len(), cols.len(), |i, j| op[(rows[i], cols[j])])
    }

    /// Sector shift of an operator: all nonzero entries must connect sectors
    /// differing by the same amount (0 or ±1 for the operators used here).
    pub fn sector_shift(&self, op: &CMat) -> Result<i64> {
        let mut shift: Option<i64> = None;
        for r in 0..op.nrows {
            for c in 0..op.ncols {
                if op[(r, c)].norm() > 0.0 {
                    let d = self.sector_of[r] as i64 - self.sector_of[c] as i64;
                    match shift {
                        None => shift = Some(d),
                        Some(s) if s != d => {
                            return Err(Error::Internal(format!(
                                "operator couples sectors with mixed shifts {s} and {d}"
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(shift.unwrap_or(0))
    }
}

/// A density operator restricted to the sector-diagonal subspace.
#[derive(Debug, Clone)]
pub struct BlockDiag {
    pub blocks: Vec<CMat>,
}

impl BlockDiag {
    pub fn zeros(space: &SectorSpace) -> Self {
        BlockDiag {
            blocks: (0..space.n_sectors())
                .map(|k| CMat::zeros(space.sector_size(k), space.sector_size(k)))
                .collect(),
        }
    }

    /// Sector-diagonal part of a dense operator.
    pub fn from_dense(space: &SectorSpace, dense: &CMat) -> Self {
        BlockDiag {
            blocks: (0..space.n_sectors())
                .map(|k| space.block(dense, k, k))
                .collect(),
        }
    }

    pub fn to_dense(&self, space: &SectorSpace) -> CMat {
        let mut out = CMat::zeros(space.dim, space.dim);
        for (k, block) in self.blocks.iter().enumerate() {
            let idx = &space.sectors[k];
            for i in 0..block.nrows {
                for j in 0..block.ncols {
                    out[(idx[i], idx[j])] = block[(i, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale_mut(&mut self, s: C64) {
        for b in &mut self.blocks {
            for v in &mut b.data {
                *v *= s;
            }
        }
    }

    pub fn hermitize_mut(&mut self) {
        for b in &mut self.blocks {
            *b = b.hermitize();
        }
    }

    pub fn sub(&self, other: &BlockDiag) -> BlockDiag {
        BlockDiag {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// tr(self · op) for a dense operator (moment extraction).
    pub fn trace_with(&self, space: &SectorSpace, op: &CMat) -> C64 {
        let mut acc = ZERO;
        for (k, block) in self.blocks.iter().enumerate() {
            let idx = &space.sectors[k];
            for i in 0..block.nrows {
                for j in 0..block.ncols {
                    acc += block[(i, j)] * op[(idx[j], idx[i])];
                }
            }
        }
        acc
    }
}

/// Sector-blocked tridiagonal superoperator: row K reads
/// (M x)_K = lower[K]·x_{K−1} + diag[K]·x_K + upper[K]·x_{K+1},
/// with x_K = vec(ρ_K) row-major (length s_K²).
#[derive(Debug, Clone)]
pub struct BlockTridiag {
    pub diag: Vec<CMat>,
    /// lower[K]: m_K × m_{K−1}; lower[0] is empty.
    pub lower: Vec<CMat>,
    /// upper[K]: m_K × m_{K+1}; upper[S] is empty.
    pub upper: Vec<CMat>,
}

impl BlockTridiag {
    pub fn zeros(sizes: &[usize]) -> Self {
        let n = sizes.len();
        let m = |k: usize| sizes[k] * sizes[k];
        BlockTridiag {
            diag: (0..n).map(|k| CMat::zeros(m(k), m(k))).collect(),
            lower: (0..n)
                .map(|k| {
                    if k == 0 {
                        CMat::zeros(m(0), 0)
                    } else {
                        CMat::zeros(m(k), m(k - 1))
                    }
                })
                .collect(),
            upper: (0..n)
                .map(|k| {
                    if k + 1 == n {
                        CMat::zeros(m(k), 0)
                    } else {
                        CMat::zeros(m(k), m(k + 1))
                    }
                })
                .collect(),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    /// M x for x given as per-sector vectors.
    pub fn apply(&self, x: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let n = self.n_blocks();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = vec![ZERO; self.diag[k].nrows];
            mat_vec_acc(&self.diag[k], &x[k], &mut acc);
            if k > 0 {
                mat_vec_acc(&self.lower[k], &x[k - 1], &mut acc);
            }
            if k + 1 < n {
                mat_vec_acc(&self.upper[k], &x[k + 1], &mut acc);
            }
            out.push(acc);
        }
        out
    }

    pub fn add_shift(&mut self, sigma: C64) {
        for d in &mut self.diag {
            let n = d.nrows;
            for i in 0..n {
                d[(i, i)] += sigma;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for blocks in [&self.diag, &self.lower, &self.upper] {
            for b in blocks.iter() {
                m = m.max(b.max_abs());
            }
        }
        m
    }

    /// Block-Thomas factorization. Fails if any Schur complement is
    /// singular, which for the shifted generators used here means the shift
    /// was chosen badly.
    pub fn factor(&self) -> Result<BlockTridiagLu> {
        let n = self.n_blocks();
        let mut dtilde_lu: Vec<Lu> = Vec::with_capacity(n);
        let mut chain: Vec<CMat> = Vec::with_capacity(n);
        let mut prev_c: Option<CMat> = None;
        for k in 0..n {
            let mut dk = self.diag[k].clone();
            if k > 0 {
                if let Some(c) = &prev_c {
                    // D̃_K = D_K − W_K · C_{K−1}
                    let corr = self.lower[k].mul(c);
                    dk = dk.sub(&corr);
                }
            }
            let lu = Lu::factor(&dk)
                .map_err(|e| Error::NonConvergence(format!("block-Thomas pivot failure at sector {k}: {e}")))?;
            let c = if k + 1 < n {
                let c = lu.solve_mat(&self.upper[k]);
                prev_c = Some(c.clone());
                c
            } else {
                prev_c = None;
                CMat::zeros(dk.nrows, 0)
            };
            dtilde_lu.push(lu);
            chain.push(c);
        }
        Ok(BlockTridiagLu {
            dtilde_lu,
            chain,
            lower: self.lower.clone(),
        })
    }
}

/// Factorized block-tridiagonal system, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct BlockTridiagLu {
    dtilde_lu: Vec<Lu>,
    /// chain[K] = D̃_K⁻¹ · upper[K]
    chain: Vec<CMat>,
    lower: Vec<CMat>,
}

impl BlockTridiagLu {
    pub fn solve(&self, rhs: &[Vec<C64>]) -> Vec<Vec<C64>> {
        let n = self.dtilde_lu.len();
        // forward: y_K = D̃_K⁻¹ (r_K − W_K y_{K−1})
        let mut y: Vec<Vec<C64>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut r = rhs[k].clone();
            if k > 0 {
                let mut corr = vec![ZERO; r.len()];
                mat_vec_acc(&self.lower[k], &y[k - 1], &mut corr);
                for (a, b) in r.iter_mut().zip(&corr) {
                    *a -= b;
                }
            }
            self.dtilde_lu[k].solve_vec_in_place(&mut r);
            y.push(r);
        }
        // backward: x_K = y_K − C_K x_{K+1}
        for k in (0..n.saturating_sub(1)).rev() {
            let mut corr = vec![ZERO; y[k].len()];
            mat_vec_acc(&self.chain[k], &y[k + 1], &mut corr);
            for (a, b) in y[k].iter_mut().zip(&corr) {
                *a -= b;
            }
        }
        y
    }
}

fn mat_vec_acc(m: &CMat, x: &[C64], out: &mut [C64]) {
    debug_assert_eq!(m.ncols, x.len());
    debug_assert_eq!(m.nrows, out.len());
    for i in 0..m.nrows {
        let row = &m.data[i * m.ncols..(i + 1) * m.ncols];
        let mut acc = ZERO;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        out[i] += acc;
    }
}

/// Accumulate the superoperator of ρ ↦ A ρ B into `target`
/// (row-major vec: M[(i,j),(k,l)] = A[i,k]·B[l,j]).
pub fn add_sandwich(target: &mut CMat, a: &CMat, b: &CMat, weight: C64) {
    let (ra, ca) = (a.nrows, a.ncols);
    let (rb, cb) = (b.nrows, b.ncols);
    // result block maps vec(ca × rb) → vec(ra × cb)
    debug_assert_eq!(target.nrows, ra * cb);
    debug_assert_eq!(target.ncols, ca * rb);
    for i in 0..ra {
        for k in 0..ca {
            let aik = a[(i, k)] * weight;
            if aik == ZERO {
                continue;
            }
            for j in 0..cb {
                for l in 0..rb {
                    target[(i * cb + j, k * rb + l)] += aik * b[(l, j)];
                }
            }
        }
    }
}

/// Accumulate ρ ↦ G ρ (left multiplication) into a square vec-block.
pub fn add_left_mul(target: &mut CMat, g: &CMat, weight: C64) {
    let s = g.nrows;
    debug_assert_eq!(target.nrows, s * s);
    for i in 0..s {
        for k in 0..s {
            let gik = g[(i, k)] * weight;
            if gik == ZERO {
                continue;
            }
            for j in 0..s {
                target[(i * s + j, k * s + j)] += gik;
            }
        }
    }
}

/// Accumulate ρ ↦ ρ G (right multiplication) into a square vec-block.
pub fn add_right_mul(target: &mut CMat, g: &CMat, weight: C64) {
    let s = g.nrows;
    debug_assert_eq!(target.nrows, s * s);
    for l in 0..s {
        for j in 0..s {
            let glj = g[(l, j)] * weight;
            if glj == ZERO {
                continue;
            }
            for i in 0..s {
                target[(i * s + j, i * s + l)] += glj;
            }
        }
    }
}

/// Identity superoperator times `weight`.
pub fn add_identity(target: &mut CMat, weight: C64) {
    let n = target.nrows;
    for i in 0..n {
        target[(i, i)] += weight;
    }
}
