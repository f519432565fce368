//! Spatial grids, power-law trapping potentials, stationary states and
//! one-body operator statistics over Slater determinants.
//!
//! The single-particle Hamiltonian `h = -1/2 d^2/dx^2 + 1/2 lambda (x-x0)^(2q)`
//! is discretised pseudospectrally: the kinetic operator is diagonal in
//! Fourier space (periodic extension of the grid) and the potential acts
//! pointwise. Stationary states come from a dense symmetric
//! eigendecomposition of the resulting matrix, so they are orthonormal in the
//! discrete `sum |psi|^2 dx` inner product to machine precision, which the
//! many-body determinant identities downstream rely on.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid_argument, invalid_state, CoreError, Result};
use crate::fft::FftPlan;
use crate::math;
use crate::C64;

/// Tolerance for the boundary-leakage check of stationary states.
pub const LEAKAGE_TOL: f64 = 1e-6;
/// Orthonormality tolerance used when validating orbital sets handed to
/// many-body assembly (evolution is allowed to drift up to this much).
pub const ORTHONORMALITY_TOL: f64 = 1e-6;

/// Uniform, symmetric 1D spatial grid. Lengths are in units of
/// `sqrt(hbar/(m*omega0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    /// Builds a grid symmetric about the origin with `n_points` samples on
    /// `[-x_half_width, x_half_width]`.
    ///
    /// `n_points >= 2` is the definitional minimum for `dx`; the stationary
    /// solvers need considerably more to resolve anything.
    pub fn symmetric(x_half_width: f64, n_points: usize) -> Result<Grid> {
        if !(x_half_width > 0.0) {
            return Err(invalid_argument(format!(
                "grid half-width must be positive, got {x_half_width}"
            )));
        }
        if n_points < 2 {
            return Err(invalid_argument(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        let dx = 2.0 * x_half_width / (n_points - 1) as f64;
        Ok(Grid {
            x_min: -x_half_width,
            x_max: x_half_width,
            n_points,
            dx,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing `(x_max - x_min) / (n_points - 1)`.
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// `i`-th sample position.
    pub fn point(&self, i: usize) -> f64 {
        self.x_min + self.dx * i as f64
    }

    /// All sample positions.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Angular wavenumbers in FFT index order for the periodic extension of
    /// the grid (period `n_points * dx`).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let period = self.dx * self.n_points as f64;
        (0..n)
            .map(|m| {
                let f = if 2 * m <= n { m } else { m - n };
                2.0 * core::f64::consts::PI * f as f64 / period
            })
            .collect()
    }
}

/// Power-law trap `V(x) = 1/2 lambda (x - x0)^(2q)`.
///
/// `q = 1` is the harmonic trap, `q = 2` the quartic trap studied throughout;
/// `lambda` carries the scaled units `m^(q-1) omega0^(q+1) / hbar^(q-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    exponent: u32,
    strength: f64,
    center: f64,
}

impl PotentialSpec {
    pub fn new(exponent_q: u32, strength: f64, center: f64) -> Result<PotentialSpec> {
        if exponent_q < 1 {
            return Err(invalid_argument("potential exponent q must be >= 1"));
        }
        if !(strength > 0.0) {
            return Err(invalid_argument(format!(
                "trap strength must be positive, got {strength}"
            )));
        }
        Ok(PotentialSpec {
            exponent: exponent_q,
            strength,
            center,
        })
    }

    /// Centered trap of the given exponent and strength.
    pub fn centered(exponent_q: u32, strength: f64) -> Result<PotentialSpec> {
        PotentialSpec::new(exponent_q, strength, 0.0)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Same trap with a different strength (used when sweeping `lambda(t)`).
    pub fn with_strength(&self, strength: f64) -> Result<PotentialSpec> {
        PotentialSpec::new(self.exponent, strength, self.center)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        0.5 * self.strength * math::powi(x - self.center, 2 * self.exponent as i32)
    }
}

/// Potential samples on the grid.
pub fn potential_values(grid: &Grid, pot: &PotentialSpec) -> Vec<f64> {
    (0..grid.n_points()).map(|i| pot.evaluate(grid.point(i))).collect()
}

/// Kinetic symbol `k^2/2` in FFT index order.
pub fn kinetic_symbol(grid: &Grid) -> Vec<f64> {
    grid.wavenumbers().iter().map(|k| 0.5 * k * k).collect()
}

/// Ordered set of orthonormal single-particle wavefunctions on a shared grid.
///
/// Stationary solves attach the eigenenergies; time-evolved snapshots carry
/// `energies() == None`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalSet {
    grid: Grid,
    /// `n_points x n_orbitals`, column `n` holding orbital `n`.
    amplitudes: DMatrix<C64>,
    energies: Option<Vec<f64>>,
}

impl OrbitalSet {
    pub fn new(grid: Grid, amplitudes: DMatrix<C64>, energies: Option<Vec<f64>>) -> Result<Self> {
        if amplitudes.nrows() != grid.n_points() {
            return Err(invalid_argument(format!(
                "amplitude rows ({}) must match grid points ({})",
                amplitudes.nrows(),
                grid.n_points()
            )));
        }
        if let Some(e) = &energies {
            if e.len() != amplitudes.ncols() {
                return Err(invalid_argument("one energy per orbital required"));
            }
        }
        Ok(OrbitalSet {
            grid,
            amplitudes,
            energies,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of orbitals (the particle number of the Fermi sea built on it).
    pub fn len(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.ncols() == 0
    }

    pub fn amplitudes(&self) -> &DMatrix<C64> {
        &self.amplitudes
    }

    /// Column view of orbital `n`.
    pub fn orbital(&self, n: usize) -> nalgebra::DVectorView<'_, C64> {
        self.amplitudes.column(n)
    }

    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    /// Discrete Gram matrix `sum_i conj(psi_m) psi_n dx`.
    pub fn gram(&self) -> DMatrix<C64> {
        let mut g = self.amplitudes.adjoint() * &self.amplitudes;
        g *= C64::new(self.grid.dx(), 0.0);
        g
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = (g[(i, j)] - C64::new(target, 0.0)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub(crate) fn require_orthonormal(&self, tol: f64) -> Result<()> {
        let defect = self.orthonormality_defect();
        if defect > tol {
            Err(invalid_state(format!(
                "orbital set is not orthonormal: defect {defect:.3e} > {tol:.1e}"
            )))
        } else {
            Ok(())
        }
    }
}

/// Discrete one-body Hamiltonian `h = T + V` on a grid.
///
/// `apply` acts with the exact same linear operator that `matrix` returns, so
/// spectral applications and dense solves are interchangeable.
pub struct OneBodyHamiltonian {
    grid: Grid,
    plan: FftPlan,
    symbol: Vec<f64>,
    potential: Vec<f64>,
}

impl OneBodyHamiltonian {
    pub fn new(grid: &Grid, pot: &PotentialSpec) -> OneBodyHamiltonian {
        OneBodyHamiltonian {
            grid: *grid,
            plan: FftPlan::new(grid.n_points()),
            symbol: kinetic_symbol(grid),
            potential: potential_values(grid, pot),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `h psi` with the kinetic term applied in Fourier space.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut buf = psi.to_vec();
        self.plan.forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(self.symbol.iter()) {
            *b *= *s;
        }
        self.plan.inverse(&mut buf);
        for (i, b) in buf.iter_mut().enumerate() {
            *b += self.potential[i] * psi[i];
        }
        buf
    }

    /// Dense real-symmetric matrix of the operator. The kinetic part is the
    /// symmetric circulant generated by the Fourier symbol.
    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.grid.n_points();
        let mut column = vec![C64::new(0.0, 0.0); m];
        for (c, s) in column.iter_mut().zip(self.symbol.iter()) {
            *c = C64::new(*s, 0.0);
        }
        self.plan.inverse(&mut column);
        let mut h = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            for l in 0..m {
                h[(j, l)] = column[(m + j - l) % m].re;
            }
        }
        for i in 0..m {
            h[(i, i)] += self.potential[i];
        }
        h
    }
}

/// Lowest `count` stationary states of the trap on the given grid.
///
/// States are normalised to `sum |psi|^2 dx = 1`, globally phased so the
/// largest-magnitude sample is real positive, and checked for boundary
/// leakage: every returned orbital must satisfy `|psi| < LEAKAGE_TOL` at both
/// grid edges, otherwise the grid is too small for the requested state.
pub fn stationary_states(grid: &Grid, pot: &PotentialSpec, count: usize) -> Result<OrbitalSet> {
    let m = grid.n_points();
    if count == 0 {
        return Err(invalid_argument("requested zero stationary states"));
    }
    if count > m {
        return Err(invalid_argument(format!(
            "requested {count} states from a {m}-point grid"
        )));
    }
    let op = OneBodyHamiltonian::new(grid, pot);
    let eig = op.matrix().symmetric_eigen();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = 1.0 / math::sqrt(grid.dx());
    let mut amps = DMatrix::<C64>::zeros(m, count);
    let mut energies = Vec::with_capacity(count);
    for (n, &idx) in order.iter().take(count).enumerate() {
        let v = eig.eigenvectors.column(idx);
        // global phase: largest-magnitude sample real positive
        let mut peak = 0usize;
        for i in 0..m {
            if math::abs(v[i]) > math::abs(v[peak]) {
                peak = i;
            }
        }
        let sign = if v[peak] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..m {
            amps[(i, n)] = C64::new(sign * scale * v[i], 0.0);
        }
        energies.push(eig.eigenvalues[idx]);
    }

    for n in 0..count {
        let edge = math::abs(amps[(0, n)].re).max(math::abs(amps[(m - 1, n)].re));
        if edge >= LEAKAGE_TOL {
            return Err(CoreError::GridTooSmall {
                orbital: n,
                amplitude: edge,
                tolerance: LEAKAGE_TOL,
            });
        }
    }

    OrbitalSet::new(*grid, amps, Some(energies))
}

/// Sum of the lowest `count` single-particle energies (the instantaneous
/// many-body ground energy of the Fermi sea). Eigenvalues only; no leakage
/// check.
pub fn fermi_sea_energy(grid: &Grid, pot: &PotentialSpec, count: usize) -> Result<f64> {
    let m = grid.n_points();
    if count == 0 || count > m {
        return Err(invalid_argument("invalid state count for ground energy"));
    }
    let op = OneBodyHamiltonian::new(grid, pot);
    let mut vals: Vec<f64> = op.matrix().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals[..count].iter().sum())
}

/// Mean and standard deviation of the total noninteracting Hamiltonian
/// `H = sum_i h(x_i)` over the Slater determinant built from `orbs`:
///
/// `<H> = sum_n <n|h|n>`,
/// `dH^2 = sum_n <n|h^2|n> - sum_{n,m} |<m|h|n>|^2`.
pub fn slater_energy_stats(orbs: &OrbitalSet, pot: &PotentialSpec) -> Result<(f64, f64)> {
    orbs.require_orthonormal(ORTHONORMALITY_TOL)?;
    let op = OneBodyHamiltonian::new(orbs.grid(), pot);
    let n = orbs.len();
    let m = orbs.grid().n_points();
    let dx = orbs.grid().dx();

    // h|psi_n> for every occupied orbital
    let mut h_psi = DMatrix::<C64>::zeros(m, n);
    for j in 0..n {
        let col: Vec<C64> = orbs.orbital(j).iter().copied().collect();
        let applied = op.apply(&col);
        for i in 0..m {
            h_psi[(i, j)] = applied[i];
        }
    }

    let mut h_elems = orbs.amplitudes().adjoint() * &h_psi;
    h_elems *= C64::new(dx, 0.0);

    let mut mean = 0.0;
    for j in 0..n {
        mean += h_elems[(j, j)].re;
    }

    // <n|h^2|n> = |h psi_n|^2 since h is Hermitian
    let mut h2_sum = 0.0;
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..m {
            acc += h_psi[(i, j)].norm_sqr();
        }
        h2_sum += acc * dx;
    }

    let mut offdiag = 0.0;
    for a in 0..n {
        for b in 0..n {
            offdiag += h_elems[(a, b)].norm_sqr();
        }
    }

    let variance = (h2_sum - offdiag).max(0.0);
    Ok((mean, math::sqrt(variance)))
}

/// Width of the harmonic-oscillator state `n` and the rescaled approximation
/// to the width of the quartic-trap state, in the paper's `sqrt(2 <x^2>)`
/// convention:
///
/// `sigma_HO = sqrt(2 (n + 1/2))`,
/// `sigma_quartic = sigma_HO * [(2n+1) / (3 lambda (2n^2+2n+1))]^(1/6)`.
pub fn ansatz_width(n: usize, strength: f64) -> Result<(f64, f64)> {
    if !(strength > 0.0) {
        return Err(invalid_argument(format!(
            "trap strength must be positive, got {strength}"
        )));
    }
    let nf = n as f64;
    let sigma_ho = math::sqrt(2.0 * (nf + 0.5));
    let ratio = (2.0 * nf + 1.0) / (3.0 * strength * (2.0 * nf * nf + 2.0 * nf + 1.0));
    let sigma_quartic = sigma_ho * math::powf(ratio, 1.0 / 6.0);
    Ok((sigma_ho, sigma_quartic))
}

/// `sqrt(2 <x^2>)` of an orbital, the width convention used for comparisons
/// against [`ansatz_width`].
pub fn orbital_width(grid: &Grid, orbital: nalgebra::DVectorView<'_, C64>) -> f64 {
    let mut x2 = 0.0;
    for i in 0..grid.n_points() {
        let x = grid.point(i);
        x2 += x * x * orbital[i].norm_sqr();
    }
    math::sqrt(2.0 * x2 * grid.dx())
}

/// Convenience wrapper building the default production grid: half-width 12,
/// 512 points, suitable for `N <= 20` at `lambda >= 1`.
pub fn default_grid() -> Grid {
    Grid::symmetric(12.0, 512).expect("default grid parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn harmonic() -> PotentialSpec {
        PotentialSpec::centered(1, 1.0).unwrap()
    }

    fn quartic(strength: f64) -> PotentialSpec {
        PotentialSpec::centered(2, strength).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = Grid::symmetric(10.0, 5).unwrap();
        assert_eq!(g.points(), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
        assert_eq!(g.dx(), 5.0);

        let g = Grid::symmetric(12.0, 1024).unwrap();
        assert_abs_diff_eq!(g.dx(), 24.0 / 1023.0, epsilon = 1e-15);

        assert!(matches!(
            Grid::symmetric(0.0, 64),
            Err(CoreError::InvalidArgument(_))
        ));
        assert!(matches!(
            Grid::symmetric(5.0, 1),
            Err(CoreError::InvalidArgument(_))
        ));
    }

    #[test]
    fn harmonic_spectrum() {
        let grid = default_grid();
        let set = stationary_states(&grid, &harmonic(), 3).unwrap();
        let e = set.energies().unwrap();
        assert_abs_diff_eq!(e[0], 0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(e[1], 1.5, epsilon = 1e-4);
        assert_abs_diff_eq!(e[2], 2.5, epsilon = 1e-4);
        assert!(set.orthonormality_defect() < 1e-8);
    }

    #[test]
    fn harmonic_spectrum_to_n30() {
        let grid = default_grid();
        let set = stationary_states(&grid, &harmonic(), 31).unwrap();
        let e = set.energies().unwrap();
        for (n, en) in e.iter().enumerate() {
            assert_abs_diff_eq!(*en, n as f64 + 0.5, epsilon = 1e-4);
        }
    }

    #[test]
    fn eigensolver_residual() {
        let grid = Grid::symmetric(9.0, 256).unwrap();
        let pot = quartic(1.0);
        let set = stationary_states(&grid, &pot, 8).unwrap();
        let op = OneBodyHamiltonian::new(&grid, &pot);
        let e = set.energies().unwrap();
        for n in 0..set.len() {
            let psi: Vec<C64> = set.orbital(n).iter().copied().collect();
            let h_psi = op.apply(&psi);
            let mut res = 0.0;
            for i in 0..grid.n_points() {
                res += (h_psi[i] - e[n] * psi[i]).norm_sqr();
            }
            res = math::sqrt(res * grid.dx());
            assert!(res < 1e-6, "residual {res:.3e} for state {n}");
        }
    }

    #[test]
    fn quartic_ground_energy() {
        // dense-grid oracle value, converged to 4 digits:
        // E0(q=2, lambda=1) = 2^(-1/3) * 0.667986... = 0.530181...
        let fine = Grid::symmetric(10.0, 2048).unwrap();
        let e_fine = stationary_states(&fine, &quartic(1.0), 1).unwrap().energies().unwrap()[0];
        assert_abs_diff_eq!(e_fine, 0.5302, epsilon = 5e-5);

        let coarse = default_grid();
        let e = stationary_states(&coarse, &quartic(1.0), 1).unwrap().energies().unwrap()[0];
        assert_abs_diff_eq!(e, e_fine, epsilon = 1e-8);
    }

    #[test]
    fn quartic_energy_scaling_law() {
        // E_n(lambda) = lambda^(1/3) E_n(1) for the pure quartic trap
        let grid = Grid::symmetric(10.0, 512).unwrap();
        let e1 = stationary_states(&grid, &quartic(1.0), 4).unwrap();
        let e8 = stationary_states(&grid, &quartic(8.0), 4).unwrap();
        let scale = math::cbrt(8.0);
        for n in 0..4 {
            assert_relative_eq!(
                e8.energies().unwrap()[n],
                scale * e1.energies().unwrap()[n],
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn virial_theorem_quartic() {
        // <T> = 2 <V> for every stationary state of the quartic trap
        let grid = Grid::symmetric(9.0, 512).unwrap();
        let pot = quartic(1.0);
        let set = stationary_states(&grid, &pot, 12).unwrap();
        let vvals = potential_values(&grid, &pot);
        let op = OneBodyHamiltonian::new(&grid, &pot);
        for n in 0..set.len() {
            let psi: Vec<C64> = set.orbital(n).iter().copied().collect();
            let h_psi = op.apply(&psi);
            let mut e_total = 0.0;
            let mut e_pot = 0.0;
            for i in 0..grid.n_points() {
                e_total += (psi[i].conj() * h_psi[i]).re;
                e_pot += vvals[i] * psi[i].norm_sqr();
            }
            e_total *= grid.dx();
            e_pot *= grid.dx();
            let e_kin = e_total - e_pot;
            assert_relative_eq!(e_kin, 2.0 * e_pot, max_relative = 1e-3);
        }
    }

    #[test]
    fn leakage_error_names_offending_state() {
        // half-width 6 holds the lowest harmonic states below the leakage
        // tolerance but not the higher ones
        let grid = Grid::symmetric(6.0, 128).unwrap();
        assert!(stationary_states(&grid, &harmonic(), 2).is_ok());
        let err = stationary_states(&grid, &harmonic(), 12).unwrap_err();
        match err {
            CoreError::GridTooSmall {
                orbital, amplitude, ..
            } => {
                assert!(orbital >= 2 && orbital < 12);
                assert!(amplitude >= LEAKAGE_TOL);
            }
            other => panic!("expected GridTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn stationary_set_has_zero_energy_variance() {
        let grid = default_grid();
        let pot = quartic(1.0);
        let set = stationary_states(&grid, &pot, 5).unwrap();
        let (mean, std) = slater_energy_stats(&set, &pot).unwrap();
        let e_sum: f64 = set.energies().unwrap().iter().sum();
        assert_abs_diff_eq!(mean, e_sum, epsilon = 1e-8);
        assert!(std < 1e-6, "stationary variance {std:.3e}");
    }

    #[test]
    fn harmonic_single_particle_stats() {
        let grid = default_grid();
        let pot = harmonic();
        let set = stationary_states(&grid, &pot, 1).unwrap();
        let (mean, std) = slater_energy_stats(&set, &pot).unwrap();
        assert_abs_diff_eq!(mean, 0.5, epsilon = 1e-6);
        assert!(std < 1e-6);
    }

    #[test]
    fn non_orthonormal_input_rejected() {
        let grid = default_grid();
        let set = stationary_states(&grid, &harmonic(), 2).unwrap();
        let mut amps = set.amplitudes().clone();
        let col0 = amps.column(0).into_owned();
        amps.column_mut(1).copy_from(&col0);
        let broken = OrbitalSet::new(grid, amps, None).unwrap();
        assert!(matches!(
            slater_energy_stats(&broken, &harmonic()),
            Err(CoreError::InvalidState(_))
        ));
    }

    #[test]
    fn ansatz_width_examples() {
        let (ho, q) = ansatz_width(0, 1.0).unwrap();
        assert_abs_diff_eq!(ho, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q, math::powf(3.0, -1.0 / 6.0), epsilon = 1e-12);
        assert_abs_diff_eq!(q, 0.8327, epsilon = 1e-4);

        let (ho, q) = ansatz_width(1, 1.0).unwrap();
        assert_abs_diff_eq!(ho, math::sqrt(3.0), epsilon = 1e-12);
        assert_abs_diff_eq!(q, 1.325, epsilon = 1e-3);

        assert!(ansatz_width(2, 0.0).is_err());
        assert!(ansatz_width(2, -1.0).is_err());
    }

    #[test]
    fn quartic_widths_track_ansatz() {
        // sqrt(2 <x^2>) of the exact quartic states vs the rescaled
        // harmonic-oscillator width, within 5% up to n = 50
        let grid = Grid::symmetric(8.0, 512).unwrap();
        let set = stationary_states(&grid, &quartic(1.0), 51).unwrap();
        for n in 0..=50 {
            let numeric = orbital_width(&grid, set.orbital(n));
            let (_, sigma_q) = ansatz_width(n, 1.0).unwrap();
            assert_relative_eq!(numeric, sigma_q, max_relative = 0.05);
        }
    }

    #[test]
    fn quartic_energies_match_ansatz_scale() {
        // exact quartic energies stay within a few percent of the
        // variational ansatz energies up to the Fermi edge of N = 50
        let grid = Grid::symmetric(8.0, 512).unwrap();
        let set = stationary_states(&grid, &quartic(1.0), 51).unwrap();
        let e = set.energies().unwrap();
        for n in 0..=50 {
            let nf = n as f64;
            let b = 3.0 * (2.0 * nf * nf + 2.0 * nf + 1.0) / 8.0;
            let a_c = math::powf((2.0 * nf + 1.0) / (8.0 * b), 1.0 / 6.0);
            let ansatz = (2.0 * nf + 1.0) / (4.0 * a_c * a_c) + math::powi(a_c, 4) * b;
            assert_relative_eq!(e[n], ansatz, max_relative = 0.05);
        }
    }

    #[test]
    fn potential_validation() {
        assert!(PotentialSpec::new(0, 1.0, 0.0).is_err());
        assert!(PotentialSpec::new(2, 0.0, 0.0).is_err());
        assert!(PotentialSpec::new(2, -3.0, 0.0).is_err());
        let p = PotentialSpec::new(2, 2.0, 0.5).unwrap();
        assert_abs_diff_eq!(p.evaluate(1.5), 1.0, epsilon = 1e-12);
    }
}
