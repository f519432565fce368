//! Brute-force small-N references: full many-body wavefunction tensors for
//! N in {2, 3}, direct reduction to the RSPDM, direct fidelity and energy
//! quadrature, and an independent implicit time integrator.
//!
//! Everything here is deliberately simple and slow; it is the ground truth
//! the fast determinant-based paths are validated against.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid_argument, CoreError, Result};
use crate::manybody::{Rspdm, Statistics};
use crate::propagate::{eval_ramp, RampSchedule};
use crate::spectral::{Grid, OneBodyHamiltonian, OrbitalSet, PotentialSpec};
use crate::C64;

/// Largest grid the dense reference integrator accepts.
const MAX_REFERENCE_GRID: usize = 1024;
/// Largest grid allowed for an N = 3 tensor (memory cap).
const MAX_TENSOR_GRID_N3: usize = 96;

/// Full N-body wavefunction sampled on the grid product `grid^N`.
#[derive(Debug, Clone)]
pub struct FullWavefunction {
    grid: Grid,
    n_particles: usize,
    statistics: Statistics,
    /// Row-major tensor: index `(i_1, ..., i_N)` flattens with `i_1` slowest.
    tensor: Vec<C64>,
}

impl FullWavefunction {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn tensor(&self) -> &[C64] {
        &self.tensor
    }

    /// Discrete norm `sum |Psi|^2 dx^N`.
    pub fn norm_sqr(&self) -> f64 {
        let dxn = crate::math::powi(self.grid.dx(), self.n_particles as i32);
        self.tensor.iter().map(|v| v.norm_sqr()).sum::<f64>() * dxn
    }
}

/// Builds the normalised Slater tensor from `N` orbitals; for TG statistics
/// the tensor is multiplied pointwise by the coordinate-ordering sign
/// `s = prod_{j<k} sign(x_k - x_j)`.
pub fn build_full_state(orbs: &OrbitalSet, statistics: Statistics) -> Result<FullWavefunction> {
    let n = orbs.len();
    if !(2..=3).contains(&n) {
        return Err(invalid_argument(format!(
            "full tensors support N in {{2, 3}}, got {n}"
        )));
    }
    let m = orbs.grid().n_points();
    if n == 3 && m > MAX_TENSOR_GRID_N3 {
        return Err(invalid_argument(format!(
            "N = 3 tensors are capped at {MAX_TENSOR_GRID_N3} grid points, got {m}"
        )));
    }
    let amps = orbs.amplitudes();
    let mut tensor = vec![C64::new(0.0, 0.0); m.pow(n as u32)];

    match n {
        2 => {
            let norm = 1.0 / crate::math::sqrt(2.0);
            for i1 in 0..m {
                for i2 in 0..m {
                    let det = amps[(i1, 0)] * amps[(i2, 1)] - amps[(i1, 1)] * amps[(i2, 0)];
                    let mut v = det * norm;
                    if statistics == Statistics::Tg {
                        v *= exchange_sign(&[i1, i2]);
                    }
                    tensor[i1 * m + i2] = v;
                }
            }
        }
        3 => {
            let norm = 1.0 / crate::math::sqrt(6.0);
            for i1 in 0..m {
                for i2 in 0..m {
                    for i3 in 0..m {
                        let a = |row: usize, col: usize| amps[([i1, i2, i3][row], col)];
                        let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
                        let mut v = det * norm;
                        if statistics == Statistics::Tg {
                            v *= exchange_sign(&[i1, i2, i3]);
                        }
                        tensor[(i1 * m + i2) * m + i3] = v;
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    Ok(FullWavefunction {
        grid: *orbs.grid(),
        n_particles: n,
        statistics,
        tensor,
    })
}

fn exchange_sign(idx: &[usize]) -> f64 {
    let mut s = 1.0;
    for j in 0..idx.len() {
        for k in j + 1..idx.len() {
            s *= match idx[k].cmp(&idx[j]) {
                core::cmp::Ordering::Greater => 1.0,
                core::cmp::Ordering::Less => -1.0,
                core::cmp::Ordering::Equal => 0.0,
            };
        }
    }
    s
}

/// Direct quadrature of the reduced one-body kernel
/// `rho(x, x') = N int Psi(x, y...) Psi^*(x', y...) dy...`.
pub fn brute_rspdm(psi: &FullWavefunction) -> Result<Rspdm> {
    let m = psi.grid.n_points();
    let n = psi.n_particles;
    let rest: usize = m.pow(n as u32 - 1);
    let weight = n as f64 * crate::math::powi(psi.grid.dx(), n as i32 - 1);

    let mut kernel = DMatrix::<C64>::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let mut acc = C64::new(0.0, 0.0);
            let ra = &psi.tensor[a * rest..(a + 1) * rest];
            let rb = &psi.tensor[b * rest..(b + 1) * rest];
            for (va, vb) in ra.iter().zip(rb.iter()) {
                acc += va * vb.conj();
            }
            acc *= weight;
            kernel[(a, b)] = acc;
            if b > a {
                kernel[(b, a)] = acc.conj();
            }
        }
    }
    Rspdm::from_kernel(psi.grid, kernel, psi.statistics, n)
}

/// `|<Psi_a | Psi_b>|^2` by direct summation.
pub fn brute_fidelity(a: &FullWavefunction, b: &FullWavefunction) -> Result<f64> {
    if a.grid != b.grid || a.n_particles != b.n_particles || a.statistics != b.statistics {
        return Err(invalid_argument(
            "full wavefunctions must share grid, size and statistics",
        ));
    }
    let dxn = crate::math::powi(a.grid.dx(), a.n_particles as i32);
    let mut acc = C64::new(0.0, 0.0);
    for (va, vb) in a.tensor.iter().zip(b.tensor.iter()) {
        acc += va.conj() * vb;
    }
    acc *= dxn;
    Ok(acc.norm_sqr())
}

/// `<H>` and `dH` of the total noninteracting Hamiltonian by applying the
/// one-body operator along every tensor axis.
pub fn brute_energy_stats(psi: &FullWavefunction, pot: &PotentialSpec) -> Result<(f64, f64)> {
    let h_psi = apply_total_hamiltonian(psi, pot);
    let dxn = crate::math::powi(psi.grid.dx(), psi.n_particles as i32);

    let mut mean = C64::new(0.0, 0.0);
    let mut h2 = 0.0;
    for (v, hv) in psi.tensor.iter().zip(h_psi.iter()) {
        mean += v.conj() * hv;
        h2 += hv.norm_sqr();
    }
    let mean = (mean * dxn).re;
    let h2 = h2 * dxn;
    let variance = (h2 - mean * mean).max(0.0);
    Ok((mean, crate::math::sqrt(variance)))
}

fn apply_total_hamiltonian(psi: &FullWavefunction, pot: &PotentialSpec) -> Vec<C64> {
    let m = psi.grid.n_points();
    let n = psi.n_particles;
    let op = OneBodyHamiltonian::new(&psi.grid, pot);

    let mut out = vec![C64::new(0.0, 0.0); psi.tensor.len()];
    let mut line = vec![C64::new(0.0, 0.0); m];
    // stride of axis `ax` in the row-major layout
    let strides: Vec<usize> = (0..n).map(|ax| m.pow((n - 1 - ax) as u32)).collect();
    for (ax, &stride) in strides.iter().enumerate() {
        let outer: usize = m.pow(ax as u32);
        let inner: usize = m.pow((n - 1 - ax) as u32);
        for o in 0..outer {
            for i in 0..inner {
                let base = o * m * inner + i;
                for k in 0..m {
                    line[k] = psi.tensor[base + k * stride];
                }
                let applied = op.apply(&line);
                for k in 0..m {
                    out[base + k * stride] += applied[k];
                }
            }
        }
    }
    out
}

/// Crank-Nicolson reference integrator: implicit Cayley stepping
/// `(1 + i dt H/2) psi_{k+1} = (1 - i dt H/2) psi_k` with the dense
/// one-body Hamiltonian. Small grids only; used solely to cross-check the
/// split-step propagator.
pub fn reference_integrator(
    initial: &OrbitalSet,
    ramp: &RampSchedule,
    exponent_q: u32,
    dt: f64,
) -> Result<OrbitalSet> {
    let grid = *initial.grid();
    let m = grid.n_points();
    if m > MAX_REFERENCE_GRID {
        return Err(CoreError::OracleFailure(format!(
            "reference integrator is limited to {MAX_REFERENCE_GRID} grid points, got {m}"
        )));
    }
    if !(dt > 0.0) {
        return Err(invalid_argument("time step must be positive"));
    }
    let t_f = ramp.t_f();
    let n_steps = (crate::math::ceil(t_f / dt) as usize).max(1);
    let dt = t_f / n_steps as f64;

    let constant_strength = matches!(ramp, RampSchedule::Constant { .. });
    let build_cayley = |lambda: f64| -> Result<(nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>, DMatrix<C64>)> {
        let pot = PotentialSpec::new(exponent_q, lambda, 0.0)?;
        let h = OneBodyHamiltonian::new(&grid, &pot).matrix();
        let mut plus = DMatrix::<C64>::zeros(m, m);
        let mut minus = DMatrix::<C64>::zeros(m, m);
        let half = C64::new(0.0, 0.5 * dt);
        for i in 0..m {
            for j in 0..m {
                let hij = C64::new(h[(i, j)], 0.0);
                plus[(i, j)] = half * hij;
                minus[(i, j)] = -half * hij;
            }
            plus[(i, i)] += C64::new(1.0, 0.0);
            minus[(i, i)] += C64::new(1.0, 0.0);
        }
        Ok((plus.lu(), minus))
    };

    let mut amps = initial.amplitudes().clone();
    let mut cached = if constant_strength {
        Some(build_cayley(ramp.lambda_f())?)
    } else {
        None
    };
    for step in 0..n_steps {
        if !constant_strength {
            let t_mid = (step as f64 + 0.5) * dt;
            cached = Some(build_cayley(eval_ramp(ramp, t_mid.min(t_f))?)?);
        }
        let (lu, minus) = cached.as_ref().expect("factorisation present");
        let rhs = minus * &amps;
        let next = lu.solve(&rhs).ok_or_else(|| {
            CoreError::OracleFailure(format!("implicit solve failed at step {step}"))
        })?;
        amps = next;
        for j in 0..amps.ncols() {
            let norm: f64 = amps.column(j).iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dx();
            if !(0.5..2.0).contains(&norm) {
                return Err(CoreError::OracleFailure(format!(
                    "norm diverged at step {step}: {norm}"
                )));
            }
        }
    }
    OrbitalSet::new(grid, amps, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manybody::{
        coherence_spectrum, density, fermi_rspdm, many_body_fidelity, tg_rspdm,
    };
    use crate::math;
    use crate::propagate::evolve;
    use crate::spectral::{slater_energy_stats, stationary_states};
    use approx::assert_abs_diff_eq;

    fn states(q: u32, lambda: f64, n: usize, half_width: f64, points: usize) -> OrbitalSet {
        let grid = Grid::symmetric(half_width, points).unwrap();
        let pot = PotentialSpec::centered(q, lambda).unwrap();
        stationary_states(&grid, &pot, n).unwrap()
    }

    fn max_kernel_diff(a: &Rspdm, b: &Rspdm) -> f64 {
        let m = a.grid().n_points();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((a.kernel()[(i, j)] - b.kernel()[(i, j)]).norm());
            }
        }
        worst
    }

    #[test]
    fn slater_tensor_is_antisymmetric_and_normalised() {
        let set = states(2, 1.0, 2, 7.0, 64);
        let psi = build_full_state(&set, Statistics::Fermi).unwrap();
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-10);

        let m = 64;
        for i in (0..m).step_by(7) {
            for j in (0..m).step_by(5) {
                let v = psi.tensor()[i * m + j];
                let w = psi.tensor()[j * m + i];
                assert!((v + w).norm() < 1e-12, "antisymmetry violated at ({i},{j})");
            }
        }

        // explicit 2x2 determinant
        let a = set.amplitudes();
        let (i, j) = (20, 41);
        let expect = (a[(i, 0)] * a[(j, 1)] - a[(i, 1)] * a[(j, 0)]) / math::sqrt(2.0);
        assert!((psi.tensor()[i * m + j] - expect).norm() < 1e-12);
    }

    #[test]
    fn tg_tensor_shares_modulus_with_fermi_tensor() {
        let set = states(2, 1.0, 2, 7.0, 64);
        let fermi = build_full_state(&set, Statistics::Fermi).unwrap();
        let tg = build_full_state(&set, Statistics::Tg).unwrap();
        assert_abs_diff_eq!(tg.norm_sqr(), 1.0, epsilon = 1e-10);
        for (f, b) in fermi.tensor().iter().zip(tg.tensor().iter()) {
            assert!((f.norm() - b.norm()).abs() < 1e-12);
        }
        // symmetric under exchange
        let m = 64;
        for i in (0..m).step_by(9) {
            for j in (0..m).step_by(4) {
                let v = tg.tensor()[i * m + j];
                let w = tg.tensor()[j * m + i];
                assert!((v - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn brute_fermi_rspdm_matches_determinant_route() {
        let set = states(2, 1.0, 2, 7.0, 64);
        let psi = build_full_state(&set, Statistics::Fermi).unwrap();
        let brute = brute_rspdm(&psi).unwrap();
        let fast = fermi_rspdm(&set).unwrap();
        assert!(max_kernel_diff(&brute, &fast) < 1e-8);
        assert_abs_diff_eq!(brute.trace(), 2.0, epsilon = 1e-8);
        assert!(brute.hermiticity_defect() < 1e-8);
    }

    #[test]
    fn brute_tg_rspdm_matches_determinant_route_n2_quartic() {
        let set = states(2, 1.0, 2, 7.0, 64);
        let psi = build_full_state(&set, Statistics::Tg).unwrap();
        let brute = brute_rspdm(&psi).unwrap();
        let fast = tg_rspdm(&set).unwrap();
        assert!(
            max_kernel_diff(&brute, &fast) < 1e-8,
            "max diff {:.3e}",
            max_kernel_diff(&brute, &fast)
        );
    }

    #[test]
    fn brute_tg_rspdm_matches_determinant_route_n3_harmonic() {
        let set = states(1, 1.0, 3, 7.0, 64);
        let psi = build_full_state(&set, Statistics::Tg).unwrap();
        let brute = brute_rspdm(&psi).unwrap();
        let fast = tg_rspdm(&set).unwrap();
        assert!(
            max_kernel_diff(&brute, &fast) < 1e-6,
            "max diff {:.3e}",
            max_kernel_diff(&brute, &fast)
        );

        // diagonal density equals the orbital density
        let dens = density(&set).unwrap();
        let diag = brute.diagonal();
        for i in 0..set.grid().n_points() {
            assert_abs_diff_eq!(diag[i], dens[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn evolved_tg_kernel_still_matches_brute_force() {
        // exercise complex orbitals and near-singular P sweeps
        let set = states(2, 1.0, 2, 7.0, 64);
        let ramp = RampSchedule::quench(1.0, 8.0, 0.4).unwrap();
        let traj = evolve(&set, &ramp, 2, 5e-4, 200).unwrap();
        let evolved = traj.final_state();
        let psi = build_full_state(evolved, Statistics::Tg).unwrap();
        let brute = brute_rspdm(&psi).unwrap();
        let fast = tg_rspdm(evolved).unwrap();
        assert!(
            max_kernel_diff(&brute, &fast) < 1e-6,
            "max diff {:.3e}",
            max_kernel_diff(&brute, &fast)
        );
    }

    #[test]
    fn brute_fidelity_checks() {
        let a = states(2, 1.0, 2, 7.0, 64);
        let b = states(2, 8.0, 2, 7.0, 64);

        let fa = build_full_state(&a, Statistics::Fermi).unwrap();
        let fb = build_full_state(&b, Statistics::Fermi).unwrap();
        assert_abs_diff_eq!(brute_fidelity(&fa, &fa).unwrap(), 1.0, epsilon = 1e-10);

        // determinant formula agrees with the direct overlap
        let direct = brute_fidelity(&fa, &fb).unwrap();
        let det = many_body_fidelity(&a, &b).unwrap();
        assert_abs_diff_eq!(direct, det, epsilon = 1e-8);

        // TG fidelities coincide with fermionic ones
        let ba = build_full_state(&a, Statistics::Tg).unwrap();
        let bb = build_full_state(&b, Statistics::Tg).unwrap();
        let tg = brute_fidelity(&ba, &bb).unwrap();
        assert_abs_diff_eq!(tg, direct, epsilon = 1e-10);
    }

    #[test]
    fn slater_stats_match_brute_quadrature() {
        // N = 2 ground orbitals of the lambda = 1 quartic trap, measured
        // under the lambda = 8 Hamiltonian
        let set = states(2, 1.0, 2, 7.0, 64);
        let pot8 = PotentialSpec::centered(2, 8.0).unwrap();
        let (mean_fast, std_fast) = slater_energy_stats(&set, &pot8).unwrap();

        let psi = build_full_state(&set, Statistics::Fermi).unwrap();
        let (mean_brute, std_brute) = brute_energy_stats(&psi, &pot8).unwrap();
        assert_abs_diff_eq!(mean_fast, mean_brute, epsilon = 1e-8);
        assert_abs_diff_eq!(std_fast, std_brute, epsilon = 1e-8);
    }

    #[test]
    fn tg_coherence_exceeds_fermi_for_ground_states() {
        let set = states(1, 1.0, 2, 7.0, 64);
        let tg = coherence_spectrum(&tg_rspdm(&set).unwrap()).unwrap();
        assert!(tg.occupations()[0] > 1.0);
    }

    #[test]
    fn crank_nicolson_stationary_phase() {
        let set = states(1, 1.0, 1, 8.0, 128);
        let e0 = set.energies().unwrap()[0];
        let ramp = RampSchedule::quench(1.0, 1.0, 0.5).unwrap();
        let out = reference_integrator(&set, &ramp, 1, 1e-5).unwrap();
        let mut overlap = C64::new(0.0, 0.0);
        for i in 0..set.grid().n_points() {
            overlap += set.orbital(0)[i].conj() * out.orbital(0)[i];
        }
        overlap *= set.grid().dx();
        let expected = math::cis(-e0 * 0.5);
        assert!(
            (overlap - expected).norm() < 1e-5,
            "phase error {:.3e}",
            (overlap - expected).norm()
        );
    }

    #[test]
    fn crank_nicolson_agrees_with_split_step_on_quench() {
        let set = states(2, 1.0, 2, 7.0, 96);
        let ramp = RampSchedule::quench(1.0, 8.0, 0.5).unwrap();

        let traj = evolve(&set, &ramp, 2, 1e-5, 50_000).unwrap();
        let split = traj.final_state();
        let cn = reference_integrator(&set, &ramp, 2, 1e-5).unwrap();

        let mut worst = 0.0f64;
        for n in 0..2 {
            for i in 0..set.grid().n_points() {
                worst = worst.max((split.orbital(n)[i] - cn.orbital(n)[i]).norm());
            }
        }
        assert!(worst < 1e-6, "pointwise deviation {worst:.3e}");
    }

    #[test]
    fn crank_nicolson_step_convergence() {
        let set = states(2, 1.0, 1, 7.0, 64);
        let ramp = RampSchedule::quench(1.0, 8.0, 0.3).unwrap();
        let coarse = reference_integrator(&set, &ramp, 2, 2e-5).unwrap();
        let fine = reference_integrator(&set, &ramp, 2, 1e-5).unwrap();
        let mut worst = 0.0f64;
        for i in 0..set.grid().n_points() {
            worst = worst.max((coarse.orbital(0)[i] - fine.orbital(0)[i]).norm());
        }
        assert!(worst < 1e-7, "dt-halving changed result by {worst:.3e}");
    }

    #[test]
    fn unsupported_particle_numbers_rejected() {
        let set = states(1, 1.0, 4, 8.0, 64);
        assert!(matches!(
            build_full_state(&set, Statistics::Fermi),
            Err(CoreError::InvalidArgument(_))
        ));
    }
}
