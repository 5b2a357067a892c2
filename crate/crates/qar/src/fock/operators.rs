//! Ladder operators and SU(2) generators for two truncated bosonic modes.
//!
//! Global basis index = n_a·levels_b + n_b (a-major). On the truncated space
//! the canonical commutators hold exactly away from the top level of each
//! mode; cross-mode products such as a†b are exact everywhere because the
//! two truncations act on different tensor factors.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{CMat, I};
use crate::poisson::DressedFrame;

use super::FockConfig;

/// Single-mode annihilation operator, a|n⟩ = √n |n−1⟩.
fn ladder(levels: usize) -> CMat {
    let mut a = CMat::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// The bare two-mode operator set: ladder operators, number operators, and
/// the SU(2) quadruple X = a†b + ab†, Y = i(a†b − ab†), Z = a†a − b†b,
/// N = a†a + b†b.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub levels_a: usize,
    pub levels_b: usize,
    pub dim: usize,
    pub a: CMat,
    pub adag: CMat,
    pub b: CMat,
    pub bdag: CMat,
    pub num_a: CMat,
    pub num_b: CMat,
    pub x: CMat,
    pub y: CMat,
    pub z: CMat,
    pub n_tot: CMat,
}

pub fn build_mode_operators(config: &FockConfig) -> Result<ModeOperators> {
    config.validate()?;
    let (la, lb) = (config.levels_a, config.levels_b);
    let ia = CMat::eye(la);
    let ib = CMat::eye(lb);
    let a = ladder(la).kron(&ib);
    let b = ia.kron(&ladder(lb));
    let adag = a.dagger();
    let bdag = b.dagger();
    let num_a = adag.mul(&a);
    let num_b = bdag.mul(&b);
    let cross = adag.mul(&b); // a†b
    let cross_dag = cross.dagger();
    let x = cross.add(&cross_dag);
    let y = cross.sub(&cross_dag).scale(I);
    let z = num_a.sub(&num_b);
    let n_tot = num_a.add(&num_b);
    Ok(ModeOperators {
        levels_a: la,
        levels_b: lb,
        dim: la * lb,
        a,
        adag,
        b,
        bdag,
        num_a,
        num_b,
        x,
        y,
        z,
        n_tot,
    })
}

impl ModeOperators {
    /// Bare working-medium Hamiltonian ω_h a†a + ω_c b†b.
    pub fn bare_hamiltonian(&self, omega_h: f64, omega_c: f64) -> CMat {
        let mut h = self.num_a.scale(Complex64::new(omega_h, 0.0));
        h.axpy(Complex64::new(omega_c, 0.0), &self.num_b);
        h
    }
}

/// Dressed-mode operators A₁ = a cosθ + b sinθ, A₂ = b cosθ − a sinθ and
/// their SU(2) set, built from the bare ladders so the oracle exercises
/// exactly the operators the moment model assumes.
#[derive(Debug, Clone)]
pub struct DressedOperators {
    pub a1: CMat,
    pub a2: CMat,
    pub x: CMat,
    pub y: CMat,
    pub z: CMat,
    pub n_tot: CMat,
    /// Ω₊ A₁†A₁ + Ω₋ A₂†A₂ (equals H_bare + εX as a matrix).
    pub hamiltonian: CMat,
    /// Noise coupling W = sin2θ·Z + cos2θ·X (equals the bare X).
    pub w: CMat,
}

pub fn build_dressed_operators(modes: &ModeOperators, frame: &DressedFrame) -> DressedOperators {
    let c = Complex64::new(frame.theta.cos(), 0.0);
    let s = Complex64::new(frame.theta.sin(), 0.0);
    let mut a1 = modes.a.scale(c);
    a1.axpy(s, &modes.b);
    let mut a2 = modes.b.scale(c);
    a2.axpy(-s, &modes.a);
    let a1d = a1.dagger();
    let a2d = a2.dagger();
    let cross = a1d.mul(&a2);
    let cross_dag = cross.dagger();
    let x = cross.add(&cross_dag);
    let y = cross.sub(&cross_dag).scale(I);
    let n1 = a1d.mul(&a1);
    let n2 = a2d.mul(&a2);
    let z = n1.sub(&n2);
    let n_tot = n1.add(&n2);
    let mut hamiltonian = n1.scale(Complex64::new(frame.omega_plus, 0.0));
    hamiltonian.axpy(Complex64::new(frame.omega_minus, 0.0), &n2);
    let mut w = z.scale(Complex64::new(frame.sin_2theta(), 0.0));
    w.axpy(Complex64::new(frame.cos_2theta(), 0.0), &x);
    DressedOperators {
        a1,
        a2,
        x,
        y,
        z,
        n_tot,
        hamiltonian,
        w,
    }
}
