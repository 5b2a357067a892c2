//! Dense complex matrices and the few factorizations the Fock-space oracle
//! needs: LU solves, a scaling-and-squaring matrix exponential, Cholesky
//! positivity probes, and a small Jacobi eigensolver for Hermitian checks.
//!
//! Row-major storage. Everything here is plain `Vec<Complex64>` arithmetic;
//! the sizes involved (per-sector blocks up to a few hundred rows) do not
//! justify a BLAS backend.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64::new(0.0, 0.0);
pub const ONE: C64 = Complex64::new(1.0, 0.0);
pub const I: C64 = Complex64::new(0.0, 1.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![ZERO; nrows * ncols],
        }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn dagger(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self += s * other
    pub fn axpy(&mut self, s: C64, other: &CMat) {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Matrix product. Inner loop runs over contiguous rows of `rhs` (ikj
    /// ordering) so it vectorizes.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch in mul");
        let (n, k, m) = (self.nrows, self.ncols, rhs.ncols);
        let mut out = CMat::zeros(n, m);
        for i in 0..n {
            let out_row = &mut out.data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[p * m..(p + 1) * m];
                for (o, r) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (p, q) = (other.nrows, other.ncols);
        CMat::from_fn(self.nrows * p, self.ncols * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &CMat) -> CMat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..self.ncols {
            let s: f64 = (0..self.nrows).map(|i| self[(i, j)].norm()).sum();
            best = best.max(s);
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitize(&self) -> CMat {
        let d = self.dagger();
        self.add(&d).scale(C64::new(0.5, 0.0))
    }

    /// Deviation from Hermiticity, ‖A − A†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.dagger()).frobenius_norm()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// LU factorization with partial pivoting of a square complex matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMat,
    pivots: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &CMat) -> Result<Lu> {
        assert!(a.is_square(), "LU requires a square matrix");
        let n = a.nrows;
        let mut lu = a.clone();
        let mut pivots = vec![0usize; n];
        for col in 0..n {
            // pivot search
            let mut pmax = 0.0;
            let mut prow = col;
            for r in col..n {
                let v = lu[(r, col)].norm();
                if v > pmax {
                    pmax = v;
                    prow = r;
                }
            }
            if pmax == 0.0 {
                return Err(Error::Internal(format!(
                    "singular matrix in LU at column {col}"
                )));
            }
            pivots[col] = prow;
            if prow != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(prow, j)];
                    lu[(prow, j)] = tmp;
                }
            }
            let inv = ONE / lu[(col, col)];
            for r in (col + 1)..n {
                let f = lu[(r, col)] * inv;
                lu[(r, col)] = f;
                if f == ZERO {
                    continue;
                }
                // row update, contiguous tail
                let (top, bottom) = lu.data.split_at_mut(r * n);
                let src = &top[col * n + (col + 1)..col * n + n];
                let dst = &mut bottom[col + 1..n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= f * s;
                }
            }
        }
        Ok(Lu { lu, pivots })
    }

    /// Solve A·x = b in place for a single right-hand side.
    pub fn solve_vec_in_place(&self, b: &mut [C64]) {
        let n = self.lu.nrows;
        assert_eq!(b.len(), n);
        for i in 0..n {
            b.swap(i, self.pivots[i]);
        }
        // forward: L y = Pb
        for i in 1..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * b[j];
            }
            b[i] = s;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * b[j];
            }
            b[i] = s / self.lu[(i, i)];
        }
    }

    /// Solve A·X = B for a matrix right-hand side.
    pub fn solve_mat(&self, b: &CMat) -> CMat {
        let n = self.lu.nrows;
        assert_eq!(b.nrows, n);
        let mut out = b.clone();
        let mut col = vec![ZERO; n];
        for j in 0..b.ncols {
            for i in 0..n {
                col[i] = out[(i, j)];
            }
            self.solve_vec_in_place(&mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    /// Reciprocal pivot-growth estimate: min |U_ii| / max |U_ii|.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.lu.nrows;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..n {
            let v = self.lu[(i, i)].norm();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}

/// Matrix exponential by [13/13] Padé approximation with scaling and squaring
/// (Higham 2005). Adequate for the anti-Hermitian kick generators and the
/// small propagator tests used here; tolerance is at machine-precision level
/// for the norms involved.
pub fn expm(a: &CMat) -> Result<CMat> {
    assert!(a.is_square());
    let n = a.nrows;
    const THETA_13: f64 = 5.371_920_351_148_152;
    let norm = a.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(C64::new(0.5_f64.powi(s), 0.0));

    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];

    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let id = CMat::eye(n);

    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let mut w1 = a6.scale(C64::new(B[13], 0.0));
    w1.axpy(C64::new(B[11], 0.0), &a4);
    w1.axpy(C64::new(B[9], 0.0), &a2);
    let mut w = a6.mul(&w1);
    w.axpy(C64::new(B[7], 0.0), &a6);
    w.axpy(C64::new(B[5], 0.0), &a4);
    w.axpy(C64::new(B[3], 0.0), &a2);
    w.axpy(C64::new(B[1], 0.0), &id);
    let u = a.mul(&w);

    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut z1 = a6.scale(C64::new(B[12], 0.0));
    z1.axpy(C64::new(B[10], 0.0), &a4);
    z1.axpy(C64::new(B[8], 0.0), &a2);
    let mut v = a6.mul(&z1);
    v.axpy(C64::new(B[6], 0.0), &a6);
    v.axpy(C64::new(B[4], 0.0), &a4);
    v.axpy(C64::new(B[2], 0.0), &a2);
    v.axpy(C64::new(B[0], 0.0), &id);

    // (v - u) r = (v + u)
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    let lu = Lu::factor(&lhs)?;
    let mut r = lu.solve_mat(&rhs);
    for _ in 0..s {
        r = r.mul(&r);
    }
    Ok(r)
}

/// Does the Hermitian matrix `h + shift·I` admit a Cholesky factorization?
/// Used as a positivity probe: success certifies λ_min(h) ≥ −shift up to
/// rounding.
pub fn cholesky_psd_probe(h: &CMat, shift: f64) -> bool {
    assert!(h.is_square());
    let n = h.nrows;
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[(i, j)];
            if i == j {
                s += C64::new(shift, 0.0);
            }
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let d = s.re;
                if d <= 0.0 || s.im.abs() > 1e-12 * (1.0 + d.abs()) {
                    return false;
                }
                l[(i, j)] = C64::new(d.sqrt(), 0.0);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    true
}

/// Lower bound on the minimum eigenvalue of a Hermitian matrix by bisection
/// over Cholesky probes. Returns a value `b` with λ_min ≥ b − `resolution`.
pub fn min_eig_lower_bound(h: &CMat, resolution: f64) -> f64 {
    let scale = h.one_norm().max(1e-300);
    let mut lo = -scale; // λ_min ≥ lo certainly fails far below −‖h‖
    let mut hi = scale;
    // Invariant: probe(−lo) fails or lo = −scale; probe(−hi) succeeds.
    if cholesky_psd_probe(h, scale) {
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if cholesky_psd_probe(h, -mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    lo
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Intended for small test matrices (trace-distance checks); O(n³) per sweep.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    assert!(h.is_square());
    let n = h.nrows;
    let mut a = h.hermitize();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * (1.0 + a.frobenius_norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Unitary 2x2 diagonalization of [[app, apq],[apq*, aqq]].
                let phase = apq / C64::new(apq.norm(), 0.0);
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // columns/rows update with complex phase
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * phase.conj() * s;
                    a[(k, q)] = akq * c + akp * phase * s;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = aqk * c + apk * phase.conj() * s;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Trace distance ½‖ρ − σ‖₁ between Hermitian matrices (small dimensions).
pub fn trace_distance(rho: &CMat, sigma: &CMat) -> f64 {
    let diff = rho.sub(sigma);
    0.5 * hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_solves_random_system() {
        let n = 12;
        let mut seed = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) - 0.5
        };
        let a = CMat::from_fn(n, n, |_, _| c(next(), next()));
        let x = CMat::from_fn(n, 1, |_, _| c(next(), next()));
        let b = a.mul(&x);
        let lu = Lu::factor(&a).unwrap();
        let xs = lu.solve_mat(&b);
        assert!(xs.sub(&x).frobenius_norm() < 1e-10 * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn lu_rejects_singular() {
        let a = CMat::zeros(3, 3);
        assert!(Lu::factor(&a).is_err());
    }

    #[test]
    fn expm_diagonal() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(0.0, std::f64::consts::PI);
        let e = expm(&a).unwrap();
        assert_relative_eq!(e[(0, 0)].re, 1.0f64.exp(), epsilon = 1e-12);
        assert_relative_eq!(e[(1, 1)].re, -1.0, epsilon = 1e-12);
        assert_relative_eq!(e[(1, 1)].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn expm_antihermitian_is_unitary() {
        // exp(i θ σx) for θ scanning past the scaling threshold
        for &theta in &[0.3, 2.0, 9.0] {
            let mut x = CMat::zeros(2, 2);
            x[(0, 1)] = ONE;
            x[(1, 0)] = ONE;
            let u = expm(&x.scale(c(0.0, theta))).unwrap();
            let udu = u.dagger().mul(&u);
            assert!(udu.sub(&CMat::eye(2)).frobenius_norm() < 1e-12);
            assert_relative_eq!(u[(0, 0)].re, theta.cos(), epsilon = 1e-12);
            assert_relative_eq!(u[(0, 1)].im, theta.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_eigenvalues_match_known() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = c(2.0, 0.0);
        h[(1, 1)] = c(2.0, 0.0);
        h[(0, 1)] = c(0.0, 1.0);
        h[(1, 0)] = c(0.0, -1.0);
        let ev = hermitian_eigenvalues(&h);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_probe_and_bound() {
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = c(1.0, 0.0);
        h[(1, 1)] = c(-1e-6, 0.0);
        assert!(!cholesky_psd_probe(&h, 0.0));
        assert!(cholesky_psd_probe(&h, 1e-5));
        let b = min_eig_lower_bound(&h, 1e-9);
        assert!(b <= -1e-6 + 1e-8 && b >= -2e-6);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let a = CMat::from_fn(2, 2, |i, j| c((2 * i + j) as f64, 0.0));
        let id = CMat::eye(3);
        let k = a.kron(&id);
        assert_eq!(k.nrows, 6);
        assert_eq!(k[(0, 0)], a[(0, 0)]);
        assert_eq!(k[(3, 0)], a[(1, 0)]);
        assert_eq!(k[(4, 1)], a[(1, 0)]);
    }
}
