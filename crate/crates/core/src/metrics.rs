//! Schatten norms, trace distances, evolution speeds of reduced states and
//! quantum-speed-limit bounds.
//!
//! Kernels are turned into dimensionless operators by the `dx` weight, so
//! trace distances and speeds are grid-independent. The speed of a reduced
//! state is obtained from central finite differences of the RSPDM kernels at
//! the recording resolution; the fermionic commutator form only serves as a
//! cross-check because the TG kernel obeys no closed one-body equation of
//! motion.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid_argument, invalid_state, Result};
use crate::manybody::{rspdm, CoherenceSpectrum, Rspdm, Statistics};
use crate::math;
use crate::propagate::Trajectory;
use crate::spectral::{fermi_sea_energy, slater_energy_stats, OrbitalSet, PotentialSpec};
use crate::C64;

/// Occupations below this threshold are dropped from the truncated
/// trace-distance approximations.
pub const OCCUPATION_CUTOFF: f64 = 1e-8;

/// Schatten p-norm `(sum_k s_k^p)^(1/p)` of the kernel operator `K * dx`,
/// with `s_k` its singular values. Hermitian kernels use `s_k = |eig_k|`.
pub fn schatten_norm(kernel: &DMatrix<C64>, dx: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid_argument(format!("Schatten order must be >= 1, got {p}")));
    }
    if kernel.nrows() != kernel.ncols() {
        return Err(invalid_argument("Schatten norm needs a square kernel"));
    }
    let singulars = singular_values(kernel, dx);
    Ok(if p == 1.0 {
        singulars.iter().sum()
    } else if p == 2.0 {
        math::sqrt(singulars.iter().map(|s| s * s).sum())
    } else {
        math::powf(singulars.iter().map(|s| math::powf(*s, p)).sum(), 1.0 / p)
    })
}

fn singular_values(kernel: &DMatrix<C64>, dx: f64) -> Vec<f64> {
    let scaled = kernel * C64::new(dx, 0.0);
    if hermiticity_defect(&scaled) <= 1e-12 * (1.0 + max_abs(&scaled)) {
        scaled
            .symmetric_eigenvalues()
            .iter()
            .map(|e| math::abs(*e))
            .collect()
    } else {
        scaled
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Trace norm of a Hermitian kernel difference (internal fast path).
fn trace_norm_hermitian(kernel: &DMatrix<C64>, dx: f64) -> f64 {
    (kernel * C64::new(dx, 0.0))
        .symmetric_eigenvalues()
        .iter()
        .map(|e| math::abs(*e))
        .sum()
}

/// Trace distance `T_D = 1/2 ||rho_a - rho_b||_1` between two reduced states
/// on the same grid.
pub fn trace_distance(a: &Rspdm, b: &Rspdm) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(invalid_argument("kernels live on different grids"));
    }
    if a.n_particles() != b.n_particles() {
        return Err(invalid_argument("kernels describe different particle numbers"));
    }
    let diff = a.kernel() - b.kernel();
    Ok(0.5 * trace_norm_hermitian(&diff, a.grid().dx()))
}

/// Finite-difference order of a speed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferenceOrder {
    Central,
    /// Boundary sample computed with a first-order one-sided difference.
    OneSided,
}

/// One instantaneous-speed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSample {
    pub value: f64,
    pub order: DifferenceOrder,
}

/// `v(t_k) = ||(rho_{k+1} - rho_{k-1}) / (2 dt)||_1` at snapshot `k`;
/// boundary snapshots fall back to a flagged one-sided difference.
pub fn instantaneous_speed(
    traj: &Trajectory,
    statistics: Statistics,
    k: usize,
) -> Result<SpeedSample> {
    let last = traj.len() - 1;
    if k > last {
        return Err(invalid_argument(format!(
            "snapshot index {k} out of range 0..={last}"
        )));
    }
    let dt = traj.dt_record();
    let dx = traj.initial().grid().dx();
    let (a, b, denom, order) = if k == 0 {
        (0, 1, dt, DifferenceOrder::OneSided)
    } else if k == last {
        (last - 1, last, dt, DifferenceOrder::OneSided)
    } else {
        (k - 1, k + 1, 2.0 * dt, DifferenceOrder::Central)
    };
    let rho_a = rspdm(traj.snapshot(a), statistics)?;
    let rho_b = rspdm(traj.snapshot(b), statistics)?;
    let diff = rho_b.kernel() - rho_a.kernel();
    Ok(SpeedSample {
        value: trace_norm_hermitian(&diff, dx) / denom,
        order,
    })
}

/// Instantaneous speed along a trajectory plus its time average.
#[derive(Debug, Clone)]
pub struct SpeedSeries {
    pub statistics: Statistics,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Trapezoid average `(1/t_f) int v dt`, endpoints included.
    pub average: f64,
    /// The first and last samples are first-order one-sided differences.
    pub endpoints_one_sided: bool,
}

/// Options for [`scan_trajectory`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanOptions {
    /// Number of leading RSPDM occupations to record per snapshot (0 skips
    /// the per-snapshot eigendecompositions).
    pub track_occupations: usize,
}

/// Everything a single streaming pass over a trajectory's reduced states can
/// produce: the speed series, optional occupation histories and the endpoint
/// kernels.
#[derive(Debug, Clone)]
pub struct TrajectoryScan {
    pub speed: SpeedSeries,
    /// Per-snapshot leading occupations (row `k` holds snapshot `k`).
    pub occupations: Option<Vec<Vec<f64>>>,
    pub initial: Rspdm,
    pub final_state: Rspdm,
}

/// Computes RSPDMs snapshot by snapshot (a rolling three-kernel window) and
/// reduces them to speeds and occupation histories in one pass.
pub fn scan_trajectory(
    traj: &Trajectory,
    statistics: Statistics,
    options: ScanOptions,
) -> Result<TrajectoryScan> {
    let count = traj.len();
    if count < 3 {
        return Err(invalid_argument(format!(
            "speed series needs at least 3 snapshots, got {count}"
        )));
    }
    let dt = traj.dt_record();
    let dx = traj.initial().grid().dx();

    let mut values = vec![0.0; count];
    let mut occupations = if options.track_occupations > 0 {
        Some(Vec::with_capacity(count))
    } else {
        None
    };
    let mut initial = None;
    let mut final_state = None;
    let mut window: [Option<Rspdm>; 3] = [None, None, None];

    for k in 0..count {
        let rho = rspdm(traj.snapshot(k), statistics)?;
        if let Some(occ) = occupations.as_mut() {
            let mut eigs: Vec<f64> = (rho.kernel() * C64::new(dx, 0.0))
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            eigs.sort_by(|a, b| b.total_cmp(a));
            eigs.truncate(options.track_occupations);
            occ.push(eigs);
        }
        if k == 0 {
            initial = Some(rho.clone());
        }
        if k == count - 1 {
            final_state = Some(rho.clone());
        }
        window[k % 3] = Some(rho);

        if k == 1 {
            let r0 = window[0].as_ref().expect("window filled");
            let r1 = window[1].as_ref().expect("window filled");
            values[0] = trace_norm_hermitian(&(r1.kernel() - r0.kernel()), dx) / dt;
        }
        if k >= 2 {
            let newer = window[k % 3].as_ref().expect("window filled");
            let older = window[(k - 2) % 3].as_ref().expect("window filled");
            values[k - 1] =
                trace_norm_hermitian(&(newer.kernel() - older.kernel()), dx) / (2.0 * dt);
            if k == count - 1 {
                let prev = window[(k - 1) % 3].as_ref().expect("window filled");
                values[k] = trace_norm_hermitian(&(newer.kernel() - prev.kernel()), dx) / dt;
            }
        }
    }

    let times = traj.times().to_vec();
    let span = times[count - 1] - times[0];
    let mut integral = 0.0;
    for k in 1..count {
        integral += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    }
    Ok(TrajectoryScan {
        speed: SpeedSeries {
            statistics,
            times,
            values,
            average: integral / span,
            endpoints_one_sided: true,
        },
        occupations,
        initial: initial.expect("count >= 3"),
        final_state: final_state.expect("count >= 3"),
    })
}

/// Speed series and trapezoid average over a trajectory.
pub fn average_speed(traj: &Trajectory, statistics: Statistics) -> Result<SpeedSeries> {
    Ok(scan_trajectory(traj, statistics, ScanOptions::default())?.speed)
}

/// Pure-state energy statistics entering the unified MT-ML bound,
/// time-averaged over the trajectory snapshots under the instantaneous
/// evolution Hamiltonian, with the mean referenced to the instantaneous
/// Fermi-sea ground energy.
#[derive(Debug, Clone, Copy)]
pub struct EnergyBudget {
    pub delta_h: f64,
    pub mean_excess: f64,
}

/// Trapezoid time average of `dH(t)` and `<H(t)> - E_gs(t)` over the
/// recorded snapshots.
pub fn energy_budget(traj: &Trajectory) -> Result<EnergyBudget> {
    let count = traj.len();
    let n = traj.initial().len();
    let grid = traj.initial().grid();
    let mut delta = Vec::with_capacity(count);
    let mut excess = Vec::with_capacity(count);
    let mut cache: Option<(f64, f64)> = None;
    for k in 0..count {
        let pot = traj.potential_at(k)?;
        let (mean, std) = slater_energy_stats(traj.snapshot(k), &pot)?;
        let e_gs = match cache {
            Some((lambda, e)) if lambda == pot.strength() => e,
            _ => {
                let e = fermi_sea_energy(grid, &pot, n)?;
                cache = Some((pot.strength(), e));
                e
            }
        };
        delta.push(std);
        excess.push(mean - e_gs);
    }
    let times = traj.times();
    let span = times[count - 1] - times[0];
    let avg = |series: &[f64]| -> f64 {
        let mut acc = 0.0;
        for k in 1..count {
            acc += 0.5 * (series[k] + series[k - 1]) * (times[k] - times[k - 1]);
        }
        acc / span
    };
    Ok(EnergyBudget {
        delta_h: avg(&delta),
        mean_excess: avg(&excess),
    })
}

/// Quantum-speed-limit bounds for one run and one choice of statistics.
///
/// `mt_bound` and `ml_bound` derive from the pure-state fidelity and are
/// statistics-independent; the geometric bound `2 T_D / v_avg` probes the
/// reduced-state dynamics. Unbounded cases (vanishing denominators at finite
/// angle or distance) are flagged and reported as infinity.
#[derive(Debug, Clone)]
pub struct QslReport {
    pub statistics: Statistics,
    pub delta_h: f64,
    pub mean_energy_excess: f64,
    pub fidelity: f64,
    pub bures_angle: f64,
    pub mt_bound: f64,
    pub ml_bound: f64,
    pub unified_bound: f64,
    pub trace_distance: f64,
    pub average_speed: f64,
    pub geometric_bound: f64,
    pub mt_unbounded: bool,
    pub ml_unbounded: bool,
    pub geometric_unbounded: bool,
}

/// Bures angle `arccos(sqrt(F))` with the fidelity clamped to `[0, 1]`.
///
/// Fidelities within `1e-12` of unity collapse to an exactly zero angle:
/// the square root would otherwise amplify determinant roundoff of order
/// `1e-15` into angles of order `1e-7`.
pub fn bures_angle(fidelity: f64) -> f64 {
    let f = fidelity.clamp(0.0, 1.0);
    if 1.0 - f < 1e-12 {
        0.0
    } else {
        math::acos(math::sqrt(f))
    }
}

/// Assembles every bound for the run described by `traj`.
///
/// `initial` and `final_state` are the pure states entering the fidelity
/// (normally the trajectory endpoints, but a target eigenset can be passed
/// as well); `pot_initial` must describe the trap the run started from.
pub fn qsl_report(
    initial: &OrbitalSet,
    final_state: &OrbitalSet,
    pot_initial: &PotentialSpec,
    traj: &Trajectory,
    statistics: Statistics,
) -> Result<QslReport> {
    if pot_initial.exponent() != traj.exponent_q()
        || pot_initial.strength() != traj.ramp().lambda_i()
        || pot_initial.center() != traj.trap_center()
    {
        return Err(invalid_argument(
            "initial potential is inconsistent with the trajectory metadata",
        ));
    }

    let fidelity = crate::manybody::many_body_fidelity(initial, final_state)?;
    let angle = bures_angle(fidelity);
    let budget = energy_budget(traj)?;

    let (mt_bound, mt_unbounded) = ratio_bound(angle, budget.delta_h, 1e-12);
    let (ml_bound, ml_unbounded) = ratio_bound(
        2.0 / core::f64::consts::PI * angle * angle,
        budget.mean_excess,
        1e-12,
    );
    let unified_bound = mt_bound.max(ml_bound);

    let scan = scan_trajectory(traj, statistics, ScanOptions::default())?;
    let t_d = trace_distance(&scan.final_state, &scan.initial)?;
    // distances below the split-step discretisation noise (~1e-8 at the
    // coarsest allowed step) indicate a closed loop; flooring them to zero
    // only loosens the bound
    let (geometric_bound, geometric_unbounded) =
        ratio_bound(2.0 * t_d, scan.speed.average, 1e-6);

    Ok(QslReport {
        statistics,
        delta_h: budget.delta_h,
        mean_energy_excess: budget.mean_excess,
        fidelity,
        bures_angle: angle,
        mt_bound,
        ml_bound,
        unified_bound,
        trace_distance: t_d,
        average_speed: scan.speed.average,
        geometric_bound,
        mt_unbounded,
        ml_unbounded,
        geometric_unbounded,
    })
}

/// `numerator / denominator` with the degenerate cases resolved: a numerator
/// at or below its roundoff floor gives 0, a vanishing denominator at finite
/// numerator gives flagged infinity.
fn ratio_bound(numerator: f64, denominator: f64, floor: f64) -> (f64, bool) {
    if numerator <= floor {
        (0.0, false)
    } else if denominator <= 1e-12 {
        (f64::INFINITY, true)
    } else {
        (numerator / denominator, false)
    }
}

/// Natural-orbital overlaps `Delta_mn = <chi_m | phi_n>` between a target
/// spectrum (rows) and a final-state spectrum (columns).
pub fn natural_orbital_overlaps(
    target: &CoherenceSpectrum,
    final_state: &CoherenceSpectrum,
) -> Result<DMatrix<C64>> {
    if target.grid() != final_state.grid() {
        return Err(invalid_argument("spectra live on different grids"));
    }
    let mut overlaps = target.orbitals().adjoint() * final_state.orbitals();
    overlaps *= C64::new(target.grid().dx(), 0.0);
    Ok(overlaps)
}

/// Trace distance evaluated three ways from natural-orbital data.
#[derive(Debug, Clone, Copy)]
pub struct TraceDistanceDecomposition {
    /// Exact value from the full spectral representation (equals the direct
    /// kernel trace distance when all natural orbitals are retained).
    pub full: f64,
    /// Cross-term-free approximation for the TG gas.
    pub tg_approx: f64,
    /// Unit-occupation approximation for spinless fermions.
    pub fermi_approx: f64,
}

/// Evaluates the trace distance between a final and a target reduced state
/// from their occupation spectra and the overlap matrix
/// `Delta_mn = <chi_m | phi_n>`.
pub fn trace_distance_decomposed(
    final_state: &CoherenceSpectrum,
    target: &CoherenceSpectrum,
    overlaps: &DMatrix<C64>,
) -> Result<TraceDistanceDecomposition> {
    let n = target.n_particles();
    if final_state.n_particles() != n {
        return Err(invalid_argument("spectra describe different particle numbers"));
    }
    let m = target.occupations().len();
    if overlaps.nrows() != m || overlaps.ncols() != final_state.occupations().len() {
        return Err(invalid_argument("overlap matrix shape mismatch"));
    }
    for (label, occ) in [("final", final_state.occupations()), ("target", target.occupations())] {
        let total: f64 = occ.iter().sum();
        if math::abs(total - n as f64) > 1e-4 {
            return Err(invalid_state(format!(
                "{label} occupations sum to {total}, expected {n}"
            )));
        }
    }

    let theta = final_state.occupations();
    let kappa = target.occupations();

    // full: eigenvalues of Delta diag(theta) Delta^dagger - diag(kappa),
    // the difference operator expressed in the target natural-orbital basis
    let mut weighted = overlaps.clone();
    for j in 0..weighted.ncols() {
        let w = C64::new(theta[j], 0.0);
        for i in 0..weighted.nrows() {
            weighted[(i, j)] *= w;
        }
    }
    let mut diff = &weighted * overlaps.adjoint();
    for i in 0..m {
        diff[(i, i)] -= C64::new(kappa[i], 0.0);
    }
    let full = 0.5
        * diff
            .symmetric_eigenvalues()
            .iter()
            .map(|e| math::abs(*e))
            .sum::<f64>();

    let cutoff = |occ: &[f64]| occ.iter().position(|&t| t < OCCUPATION_CUTOFF).unwrap_or(occ.len());
    let m_keep = cutoff(kappa);
    let n_keep = cutoff(theta);

    // TG approximation: drop the cross terms |chi_m><chi_l|, l != m
    let mut tg_approx = 0.0;
    for mm in 0..m_keep {
        let mut inner = kappa[mm] * kappa[mm];
        for nn in 0..n_keep {
            let w = overlaps[(mm, nn)].norm_sqr();
            inner += w * (theta[nn] * theta[nn] - 2.0 * theta[nn] * kappa[mm]);
        }
        tg_approx += math::sqrt(inner.max(0.0));
    }
    tg_approx *= 0.5;

    // fermionic approximation: kappa_n = theta_n = 1 below the Fermi edge
    let mut fermi_approx = 0.0;
    for mm in 0..n.min(m) {
        let mut captured = 0.0;
        for nn in 0..n.min(overlaps.ncols()) {
            captured += overlaps[(mm, nn)].norm_sqr();
        }
        fermi_approx += math::sqrt((1.0 - captured).max(0.0));
    }
    fermi_approx *= 0.5;

    Ok(TraceDistanceDecomposition {
        full,
        tg_approx,
        fermi_approx,
    })
}
