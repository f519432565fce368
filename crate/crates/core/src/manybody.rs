//! Many-body assembly over the Bose-Fermi mapping: overlap matrices,
//! determinant fidelities, reduced single-particle density matrices (RSPDMs)
//! for both statistics, particle densities and coherence spectra.
//!
//! The TG kernel follows the determinant representation
//! `rho_B(x, x') = sum_{p,q} psi_p(x) [det(P) (P^-1)^T]_{pq} psi_q^*(x')`
//! with `P_{pq}(x, x') = delta_{pq} - 2 int_x^{x'} psi_p(y) psi_q^*(y) dy`.
//! The subinterval integral is accumulated incrementally with the trapezoid
//! rule while sweeping `x'` along each kernel row, which together with
//! discretely orthonormal orbitals makes the kernel agree with the
//! brute-force reduction of the mapped many-body wavefunction to machine
//! precision.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid_argument, invalid_state, CoreError, Result};
use crate::math;
use crate::spectral::{Grid, OrbitalSet, ORTHONORMALITY_TOL};
use crate::C64;

/// Determinant magnitude below which the LU route for `det(P) P^-1` is
/// abandoned for the exact cofactor adjugate.
pub const SINGULAR_DET_TOL: f64 = 1e-12;
/// Relative pivot degradation that triggers the cofactor fallback.
const PIVOT_RATIO_TOL: f64 = 1e-7;
/// Hermiticity tolerance accepted by the spectral decomposition.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Particle statistics of a reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    /// Spinless noninteracting fermions.
    Fermi,
    /// Hard-core bosons (Tonks-Girardeau gas).
    Tg,
}

impl core::fmt::Display for Statistics {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Statistics::Fermi => write!(f, "fermi"),
            Statistics::Tg => write!(f, "tg"),
        }
    }
}

/// Matrix of single-particle overlaps `P_ij = <psi_i | phi_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    matrix: DMatrix<C64>,
}

impl OverlapMatrix {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn determinant(&self) -> C64 {
        self.matrix.clone().lu().determinant()
    }
}

/// `P_ij = sum_k conj(psi_i(x_k)) phi_j(x_k) dx` between two orbital sets on
/// the same grid.
pub fn overlap_matrix(a: &OrbitalSet, b: &OrbitalSet) -> Result<OverlapMatrix> {
    if a.grid() != b.grid() {
        return Err(invalid_argument("orbital sets live on different grids"));
    }
    if a.len() != b.len() {
        return Err(invalid_argument(format!(
            "orbital sets have different sizes ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut p = a.amplitudes().adjoint() * b.amplitudes();
    p *= C64::new(a.grid().dx(), 0.0);
    Ok(OverlapMatrix { matrix: p })
}

/// Many-body fidelity `F = |det P|^2` between the Slater determinants built
/// from two orbital sets. Identical for the Fermi gas and the TG gas.
pub fn many_body_fidelity(a: &OrbitalSet, b: &OrbitalSet) -> Result<f64> {
    let p = overlap_matrix(a, b)?;
    let f = p.determinant().norm_sqr();
    Ok(f.min(1.0))
}

/// Reduced single-particle density matrix `rho(x_i, x_j)`, normalised so the
/// discrete trace `sum_i rho(x_i, x_i) dx` equals the particle number.
#[derive(Debug, Clone)]
pub struct Rspdm {
    grid: Grid,
    kernel: DMatrix<C64>,
    statistics: Statistics,
    n_particles: usize,
}

impl Rspdm {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kernel(&self) -> &DMatrix<C64> {
        &self.kernel
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Diagonal of the kernel (the particle density).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.n_points())
            .map(|i| self.kernel[(i, i)].re)
            .collect()
    }

    /// `sum_i rho(x_i, x_i) dx`.
    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum::<f64>() * self.grid.dx()
    }

    /// Largest absolute entry of `rho - rho^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.grid.n_points();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                let d = (self.kernel[(i, j)] - self.kernel[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Assembles an RSPDM from parts (used by the brute-force oracle).
    pub fn from_kernel(
        grid: Grid,
        kernel: DMatrix<C64>,
        statistics: Statistics,
        n_particles: usize,
    ) -> Result<Rspdm> {
        if kernel.nrows() != grid.n_points() || kernel.ncols() != grid.n_points() {
            return Err(invalid_argument("kernel shape must match the grid"));
        }
        Ok(Rspdm {
            grid,
            kernel,
            statistics,
            n_particles,
        })
    }
}

/// Fermionic RSPDM `rho_F(x, x') = sum_{n<N} psi_n(x) psi_n^*(x')`.
pub fn fermi_rspdm(orbs: &OrbitalSet) -> Result<Rspdm> {
    orbs.require_orthonormal(ORTHONORMALITY_TOL)?;
    if orbs.is_empty() {
        return Err(invalid_argument("orbital set is empty"));
    }
    let kernel = orbs.amplitudes() * orbs.amplitudes().adjoint();
    Ok(Rspdm {
        grid: *orbs.grid(),
        kernel,
        statistics: Statistics::Fermi,
        n_particles: orbs.len(),
    })
}

/// TG-gas RSPDM via the determinant representation, rows computed
/// independently (in parallel with the `parallel` feature) and the lower
/// triangle filled by Hermitian symmetry.
///
/// Near-singular `P` is evaluated through the adjugate limit, which stays
/// finite; the only hard failure is a non-finite kernel value.
pub fn tg_rspdm(orbs: &OrbitalSet) -> Result<Rspdm> {
    orbs.require_orthonormal(ORTHONORMALITY_TOL)?;
    if orbs.is_empty() {
        return Err(invalid_argument("orbital set is empty"));
    }
    let m = orbs.grid().n_points();
    let dx = orbs.grid().dx();
    let amps = orbs.amplitudes();

    let compute_row = |i: usize| -> core::result::Result<Vec<C64>, CoreError> {
        let mut work = TgRowWorkspace::new(orbs.len());
        work.row(amps, dx, i)
    };

    #[cfg(feature = "parallel")]
    let rows: core::result::Result<Vec<Vec<C64>>, CoreError> = {
        use rayon::prelude::*;
        (0..m).into_par_iter().map(compute_row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: core::result::Result<Vec<Vec<C64>>, CoreError> = (0..m).map(compute_row).collect();
    let rows = rows?;

    let mut kernel = DMatrix::<C64>::zeros(m, m);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + off;
            kernel[(i, j)] = v;
            if j > i {
                kernel[(j, i)] = v.conj();
            }
        }
    }

    Ok(Rspdm {
        grid: *orbs.grid(),
        kernel,
        statistics: Statistics::Tg,
        n_particles: orbs.len(),
    })
}

/// RSPDM for the requested statistics.
pub fn rspdm(orbs: &OrbitalSet, statistics: Statistics) -> Result<Rspdm> {
    match statistics {
        Statistics::Fermi => fermi_rspdm(orbs),
        Statistics::Tg => tg_rspdm(orbs),
    }
}

/// Particle density `n(x) = sum_{n<N} |psi_n(x)|^2` (identical for both
/// statistics under the Bose-Fermi mapping).
pub fn density(orbs: &OrbitalSet) -> Result<Vec<f64>> {
    orbs.require_orthonormal(ORTHONORMALITY_TOL)?;
    let m = orbs.grid().n_points();
    let mut out = vec![0.0; m];
    for n in 0..orbs.len() {
        for (i, v) in orbs.orbital(n).iter().enumerate() {
            out[i] += v.norm_sqr();
        }
    }
    Ok(out)
}

/// Occupation numbers and natural orbitals of an RSPDM.
#[derive(Debug, Clone)]
pub struct CoherenceSpectrum {
    grid: Grid,
    n_particles: usize,
    statistics: Statistics,
    occupations: Vec<f64>,
    orbitals: DMatrix<C64>,
}

impl CoherenceSpectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Occupations `theta_n`, descending. Sums to the particle number.
    pub fn occupations(&self) -> &[f64] {
        &self.occupations
    }

    /// Natural orbitals as columns, normalised to `sum |phi|^2 dx = 1`,
    /// ordered like the occupations.
    pub fn orbitals(&self) -> &DMatrix<C64> {
        &self.orbitals
    }
}

/// Hermitian eigendecomposition of `kernel * dx`; occupations are
/// grid-independent and sum to the particle number.
pub fn coherence_spectrum(rho: &Rspdm) -> Result<CoherenceSpectrum> {
    let defect = rho.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(invalid_state(format!(
            "kernel is not Hermitian: defect {defect:.3e}"
        )));
    }
    let dx = rho.grid().dx();
    let scaled = rho.kernel() * C64::new(dx, 0.0);
    let eig = scaled.symmetric_eigen();

    let m = rho.grid().n_points();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let scale = C64::new(1.0 / math::sqrt(dx), 0.0);
    let mut occupations = Vec::with_capacity(m);
    let mut orbitals = DMatrix::<C64>::zeros(m, m);
    for (col, &idx) in order.iter().enumerate() {
        occupations.push(eig.eigenvalues[idx]);
        for i in 0..m {
            orbitals[(i, col)] = eig.eigenvectors[(i, idx)] * scale;
        }
    }

    Ok(CoherenceSpectrum {
        grid: *rho.grid(),
        n_particles: rho.n_particles(),
        statistics: rho.statistics(),
        occupations,
        orbitals,
    })
}

/// Per-row state for the TG kernel sweep: the `P` matrix accumulated along
/// the row plus factorisation scratch.
struct TgRowWorkspace {
    n: usize,
    p_mat: Vec<C64>,
    lu: Vec<C64>,
    perm: Vec<usize>,
    rhs: Vec<C64>,
    minor: Vec<C64>,
    u_fixed: Vec<C64>,
    u_col: Vec<C64>,
    u_prev: Vec<C64>,
}

impl TgRowWorkspace {
    fn new(n: usize) -> Self {
        TgRowWorkspace {
            n,
            p_mat: vec![C64::new(0.0, 0.0); n * n],
            lu: vec![C64::new(0.0, 0.0); n * n],
            perm: vec![0; n],
            rhs: vec![C64::new(0.0, 0.0); n],
            minor: vec![C64::new(0.0, 0.0); n.saturating_sub(1) * n.saturating_sub(1)],
            u_fixed: vec![C64::new(0.0, 0.0); n],
            u_col: vec![C64::new(0.0, 0.0); n],
            u_prev: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Kernel values `rho(x_i, x_j)` for `j = i..m`.
    fn row(&mut self, amps: &DMatrix<C64>, dx: f64, i: usize) -> Result<Vec<C64>> {
        let n = self.n;
        let m = amps.nrows();
        for p in 0..n {
            self.u_fixed[p] = amps[(i, p)];
        }
        // P starts as the identity (zero-length integral)
        for v in self.p_mat.iter_mut() {
            *v = C64::new(0.0, 0.0);
        }
        for p in 0..n {
            self.p_mat[p * n + p] = C64::new(1.0, 0.0);
        }

        let mut out = Vec::with_capacity(m - i);
        self.u_prev.copy_from_slice(&self.u_fixed);
        for j in i..m {
            if j > i {
                for p in 0..n {
                    self.u_col[p] = amps[(j, p)];
                }
                // trapezoid increment of -2 int psi_p psi_q^* over
                // [x_{j-1}, x_j]
                let (p_mat, u_prev, u_col) = (&mut self.p_mat, &self.u_prev, &self.u_col);
                rank_one_update(p_mat, u_prev, -dx);
                rank_one_update(p_mat, u_col, -dx);
                self.u_prev.copy_from_slice(&self.u_col);
            }

            let routed_through_lu = self.try_lu_adjugate();
            if !routed_through_lu {
                self.cofactor_adjugate();
            }

            // rho(x_i, x_j) = sum_q (adj(P) u_i)_q conj(psi_q(x_j))
            let mut val = C64::new(0.0, 0.0);
            for q in 0..n {
                let uq = if j > i { self.u_col[q] } else { self.u_fixed[q] };
                val += self.rhs[q] * uq.conj();
            }
            if !val.re.is_finite() || !val.im.is_finite() {
                return Err(CoreError::NumericalFailure(format!(
                    "TG kernel value not finite at grid pair ({i}, {j})"
                )));
            }
            out.push(val);
        }
        Ok(out)
    }

    /// Attempts `rhs = det(P) P^-1 u_fixed` through partially pivoted LU.
    /// Returns false if the factorisation looks too close to singular, in
    /// which case the caller must use the cofactor route.
    fn try_lu_adjugate(&mut self) -> bool {
        let n = self.n;
        self.lu.copy_from_slice(&self.p_mat);
        let mut det = C64::new(1.0, 0.0);
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = self.lu[k * n + k].norm();
            for r in k + 1..n {
                let mag = self.lu[r * n + k].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            self.perm[k] = pivot_row;
            if pivot_row != k {
                for c in 0..n {
                    self.lu.swap(k * n + c, pivot_row * n + c);
                }
                det = -det;
            }
            min_pivot = min_pivot.min(pivot_mag);
            max_pivot = max_pivot.max(pivot_mag);
            if pivot_mag == 0.0 {
                return false;
            }
            let pivot = self.lu[k * n + k];
            det *= pivot;
            for r in k + 1..n {
                let factor = self.lu[r * n + k] / pivot;
                self.lu[r * n + k] = factor;
                for c in k + 1..n {
                    let sub = factor * self.lu[k * n + c];
                    self.lu[r * n + c] -= sub;
                }
            }
        }
        if det.norm() < SINGULAR_DET_TOL || min_pivot < PIVOT_RATIO_TOL * max_pivot {
            return false;
        }

        self.rhs.copy_from_slice(&self.u_fixed);
        for k in 0..n {
            if self.perm[k] != k {
                self.rhs.swap(k, self.perm[k]);
            }
        }
        for k in 0..n {
            for r in k + 1..n {
                let sub = self.lu[r * n + k] * self.rhs[k];
                self.rhs[r] -= sub;
            }
        }
        for k in (0..n).rev() {
            for c in k + 1..n {
                let sub = self.lu[k * n + c] * self.rhs[c];
                self.rhs[k] -= sub;
            }
            self.rhs[k] /= self.lu[k * n + k];
        }
        for v in self.rhs.iter_mut() {
            *v *= det;
        }
        true
    }

    /// Exact adjugate contraction
    /// `rhs_q = sum_p (-1)^(p+q) det(P del row p, del col q) u_p`,
    /// finite for singular `P`.
    fn cofactor_adjugate(&mut self) {
        let n = self.n;
        if n == 1 {
            self.rhs[0] = self.u_fixed[0];
            return;
        }
        for q in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..n {
                let mut mi = 0;
                for r in 0..n {
                    if r == p {
                        continue;
                    }
                    for c in 0..n {
                        if c == q {
                            continue;
                        }
                        self.minor[mi] = self.p_mat[r * n + c];
                        mi += 1;
                    }
                }
                let d = dense_det(&mut self.minor, n - 1);
                let sign = if (p + q) % 2 == 0 { 1.0 } else { -1.0 };
                acc += self.u_fixed[p] * d * sign;
            }
            self.rhs[q] = acc;
        }
    }
}

#[inline]
fn rank_one_update(mat: &mut [C64], u: &[C64], scale: f64) {
    let n = u.len();
    for p in 0..n {
        let up = u[p] * scale;
        let row = &mut mat[p * n..(p + 1) * n];
        for (q, entry) in row.iter_mut().enumerate() {
            *entry += up * u[q].conj();
        }
    }
}

/// In-place LU determinant of a row-major `k x k` block (destroys `a`).
fn dense_det(a: &mut [C64], k: usize) -> C64 {
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut det = C64::new(1.0, 0.0);
    for col in 0..k {
        let mut pivot_row = col;
        let mut pivot_mag = a[col * k + col].norm();
        for r in col + 1..k {
            let mag = a[r * k + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for c in 0..k {
                a.swap(col * k + c, pivot_row * k + c);
            }
            det = -det;
        }
        let pivot = a[col * k + col];
        det *= pivot;
        for r in col + 1..k {
            let factor = a[r * k + col] / pivot;
            for c in col + 1..k {
                let sub = factor * a[col * k + c];
                a[r * k + c] -= sub;
            }
        }
    }
    det
}
