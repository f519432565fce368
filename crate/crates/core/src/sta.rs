//! Variational shortcut-to-adiabaticity design for power-law trap
//! compressions.
//!
//! A scaled Hermite-Gaussian ansatz for the n-th trap eigenstate reduces the
//! dynamics to the scaling factor `a(t)` obeying the Ermakov-like equation
//!
//! `a'' + lambda(t) a^(2q-1) D(n, q) = a^(-3)`,
//!
//! whose fixed point at constant strength is `a_c = [D(n,q) lambda]^(-1/(2q+2))`.
//! A shortcut ramp is reverse-engineered by interpolating `a(t)` between the
//! initial and final fixed points with a quintic that has vanishing first and
//! second derivatives at both ends, then solving the equation for
//! `lambda(t)`.
//!
//! The moment coefficients are evaluated from the exact even moments
//! `<x^(2k)>` of harmonic-oscillator eigenstates (three-term ladder
//! recurrence), for which `D(n, 1) = 1` exactly (harmonic scale invariance)
//! and `D(n, 2) = 3(2n^2+2n+1)/(2n+1)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid_argument, invalid_state, CoreError, Result};
use crate::math;
use crate::propagate::RampSchedule;

/// Quartic-trap Lagrangian coefficient `B(n) = 3(2n^2 + 2n + 1)/8`.
pub fn quartic_coefficient(n: usize) -> f64 {
    let nf = n as f64;
    3.0 * (2.0 * nf * nf + 2.0 * nf + 1.0) / 8.0
}

/// Exact even moment `<n| x^(2k) |n>` of the unit-width harmonic-oscillator
/// eigenstate, computed by applying the position operator through the ladder
/// recurrence `x |m> = sqrt((m+1)/2) |m+1> + sqrt(m/2) |m-1>`.
pub fn hermite_even_moment(n: usize, k: usize) -> f64 {
    let dim = n + 2 * k + 1;
    let mut cur = vec![0.0f64; dim];
    let mut next = vec![0.0f64; dim];
    cur[n] = 1.0;
    for _ in 0..k {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for m in 0..dim {
            let c = cur[m];
            if c == 0.0 {
                continue;
            }
            if m + 1 < dim {
                next[m + 1] += c * math::sqrt((m as f64 + 1.0) / 2.0);
            }
            if m > 0 {
                next[m - 1] += c * math::sqrt(m as f64 / 2.0);
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    // <n| x^(2k) |n> = |x^k |n>|^2
    cur.iter().map(|c| c * c).sum()
}

/// Moment table of the power-law compression problem: `moments[k]` holds
/// `<x^(2k)>` for `k = 0..=q`, and `d` the coefficient of the simplified
/// Ermakov-like equation, `D(n, q) = 2 q <x^(2q)> / (2n + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionCoefficients {
    pub design_index: usize,
    pub power: u32,
    pub moments: Vec<f64>,
    pub d: f64,
}

/// Coefficient table for eigenstate `n` in an `x^(2q)` trap.
pub fn general_coefficients(n: usize, q: u32) -> Result<CompressionCoefficients> {
    if q < 1 {
        return Err(invalid_argument("potential exponent q must be >= 1"));
    }
    let moments: Vec<f64> = (0..=q as usize).map(|k| hermite_even_moment(n, k)).collect();
    let d = 2.0 * q as f64 * moments[q as usize] / (2.0 * n as f64 + 1.0);
    Ok(CompressionCoefficients {
        design_index: n,
        power: q,
        moments,
        d,
    })
}

/// Fixed point of the scaling factor at constant strength:
/// `a_c = [D(n, q) lambda]^(-1/(2q+2))`. For `q = 2` this reduces to
/// `[(2n+1) / (8 B(n) lambda)]^(1/6)`.
pub fn scaling_fixed_point(n: usize, q: u32, strength: f64) -> Result<f64> {
    if !(strength > 0.0) {
        return Err(invalid_argument(format!(
            "trap strength must be positive, got {strength}"
        )));
    }
    let coeffs = general_coefficients(n, q)?;
    Ok(math::powf(
        coeffs.d * strength,
        -1.0 / (2.0 * q as f64 + 2.0),
    ))
}

/// Quintic scaling factor `a(t) = sum c_i t^i` interpolating between the
/// fixed points of the initial and final strengths with
/// `a' = a'' = 0` at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPolynomial {
    coefficients: [f64; 6],
    t_f: f64,
    design_index: usize,
    power: u32,
    lambda_i: f64,
    lambda_f: f64,
}

impl ScalingPolynomial {
    pub fn coefficients(&self) -> &[f64; 6] {
        &self.coefficients
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn design_index(&self) -> usize {
        self.design_index
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn lambda_i(&self) -> f64 {
        self.lambda_i
    }

    pub fn lambda_f(&self) -> f64 {
        self.lambda_f
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn first_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        let mut acc = 0.0;
        for i in (1..6).rev() {
            acc = acc * t + i as f64 * c[i];
        }
        acc
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        let mut acc = 0.0;
        for i in (2..6).rev() {
            acc = acc * t + (i * (i - 1)) as f64 * c[i];
        }
        acc
    }

    pub fn third_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        6.0 * c[3] + 24.0 * c[4] * t + 60.0 * c[5] * t * t
    }
}

/// Designs the unique quintic scaling factor through the six endpoint
/// conditions `a(0) = a_c(lambda_i)`, `a(t_f) = a_c(lambda_f)`,
/// `a' = a'' = 0` at both ends.
pub fn design_scaling(
    n: usize,
    q: u32,
    lambda_i: f64,
    lambda_f: f64,
    t_f: f64,
) -> Result<ScalingPolynomial> {
    if !(t_f > 0.0) {
        return Err(invalid_argument(format!(
            "ramp duration must be positive, got {t_f}"
        )));
    }
    let a_i = scaling_fixed_point(n, q, lambda_i)?;
    let a_f = scaling_fixed_point(n, q, lambda_f)?;
    let delta = a_f - a_i;
    // minimal-jerk profile a_i + delta (10 s^3 - 15 s^4 + 6 s^5), s = t/t_f:
    // the unique quintic satisfying the six conditions
    let t3 = t_f * t_f * t_f;
    let coefficients = [
        a_i,
        0.0,
        0.0,
        10.0 * delta / t3,
        -15.0 * delta / (t3 * t_f),
        6.0 * delta / (t3 * t_f * t_f),
    ];
    Ok(ScalingPolynomial {
        coefficients,
        t_f,
        design_index: n,
        power: q,
        lambda_i,
        lambda_f,
    })
}

/// Shortcut ramp `lambda(t)` sampled on a dense uniform mesh, inverted from
/// the Ermakov-like equation. `nonpositive` flags trap inversion
/// (`lambda <= 0` somewhere); such ramps are usable but physically mean the
/// trap momentarily turns over.
#[derive(Debug, Clone, PartialEq)]
pub struct StaRamp {
    times: Vec<f64>,
    values: Vec<f64>,
    design_index: usize,
    power: u32,
    lambda_i: f64,
    lambda_f: f64,
    t_f: f64,
    nonpositive: bool,
}

impl StaRamp {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn design_index(&self) -> usize {
        self.design_index
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn lambda_i(&self) -> f64 {
        self.lambda_i
    }

    pub fn lambda_f(&self) -> f64 {
        self.lambda_f
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    /// True if any sample has `lambda <= 0`.
    pub fn has_nonpositive_strength(&self) -> bool {
        self.nonpositive
    }

    /// Converts to a sampled schedule for the propagator.
    pub fn to_schedule(&self) -> Result<RampSchedule> {
        RampSchedule::sampled(self.lambda_i, self.lambda_f, self.t_f, self.values.clone())
    }

    /// `(t, lambda)` rows with 12 significant digits, bit-stable across runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda\n");
        for (t, v) in self.times.iter().zip(self.values.iter()) {
            out.push_str(&format!("{t:.11e},{v:.11e}\n"));
        }
        out
    }
}

/// Default sample count for [`ramp_from_scaling`].
pub const DEFAULT_RAMP_SAMPLES: usize = 4001;

/// Inverts the Ermakov-like equation along the polynomial:
/// `lambda(t) = (a^(-3) - a'') / (a^(2q-1) D(n, q))`.
pub fn ramp_from_scaling(poly: &ScalingPolynomial, samples: usize) -> Result<StaRamp> {
    if samples < 4 {
        return Err(invalid_argument("ramp needs at least 4 samples"));
    }
    let coeffs = general_coefficients(poly.design_index, poly.power)?;
    let d = coeffs.d;
    let t_f = poly.t_f;
    let mut times = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    let mut nonpositive = false;
    for k in 0..samples {
        let t = t_f * k as f64 / (samples - 1) as f64;
        let a = poly.evaluate(t);
        if !(a > 0.0) {
            return Err(CoreError::DesignInfeasible(format!(
                "scaling factor a({t}) = {a} is not positive"
            )));
        }
        let a2 = a * a;
        let a3 = a2 * a;
        let lambda =
            (1.0 / a3 - poly.second_derivative(t)) / (math::powi(a, 2 * poly.power as i32 - 1) * d);
        if lambda <= 0.0 {
            nonpositive = true;
        }
        times.push(t);
        values.push(lambda);
    }
    Ok(StaRamp {
        times,
        values,
        design_index: poly.design_index,
        power: poly.power,
        lambda_i: poly.lambda_i,
        lambda_f: poly.lambda_f,
        t_f,
        nonpositive,
    })
}

/// Largest residual of the Ermakov-like equation
/// `|a'' + lambda(t) a^(2q-1) D(n) - a^(-3)|` over the ramp mesh.
pub fn ermakov_residual(poly: &ScalingPolynomial, ramp: &StaRamp) -> Result<f64> {
    if poly.design_index != ramp.design_index
        || poly.power != ramp.power
        || math::abs(poly.t_f - ramp.t_f) > 1e-12
    {
        return Err(invalid_argument(
            "polynomial and ramp metadata are inconsistent",
        ));
    }
    let d = general_coefficients(poly.design_index, poly.power)?.d;
    let mut worst = 0.0f64;
    for (t, lambda) in ramp.times.iter().zip(ramp.values.iter()) {
        let a = poly.evaluate(*t);
        let res = poly.second_derivative(*t) + lambda * math::powi(a, 2 * poly.power as i32 - 1) * d
            - 1.0 / (a * a * a);
        worst = worst.max(math::abs(res));
    }
    Ok(worst)
}

/// Instantaneous variational parameters of the scaled Hermite-Gaussian
/// ansatz: width scale, chirp, slope and wavefunction center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalState {
    pub scale: f64,
    pub chirp: f64,
    pub slope: f64,
    pub center: f64,
}

/// Time derivatives of [`VariationalState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalRates {
    pub scale: f64,
    pub chirp: f64,
    pub slope: f64,
    pub center: f64,
}

/// Right-hand side of the Euler-Lagrange system for eigenstate `n` in an
/// `x^(2q)` trap centered at `trap_center`:
///
/// `a' = 2 a b`,
/// `b' = 1/(2 a^4) - 2 b^2 - lambda / ((2n+1) a^2) sum_k k C_k`,
/// `c' = lambda sum_{k<q} (q - k) C_k / (x0 - xi)`,
/// `xi' = c`,
///
/// with `C_k = binom(2q, 2k) (x0 - xi)^(2(q-k)) a^(2k) <x^(2k)>`. The slope
/// equation is evaluated in polynomial form, so the centered case
/// `xi = x0` is regular and gives `c' = 0`.
pub fn variational_ode_rhs(
    state: &VariationalState,
    lambda: f64,
    n: usize,
    q: u32,
    trap_center: f64,
) -> Result<VariationalRates> {
    if !(state.scale > 0.0) {
        return Err(invalid_state(format!(
            "scaling factor must be positive, got {}",
            state.scale
        )));
    }
    let coeffs = general_coefficients(n, q)?;
    let a = state.scale;
    let b = state.chirp;
    let sep = trap_center - state.center;
    let qf = q as f64;
    let two_n_plus_1 = 2.0 * n as f64 + 1.0;

    let mut weighted_sum = 0.0; // sum_k k C_k
    let mut slope_sum = 0.0; // sum_k (q - k) C_k / (x0 - xi), polynomial form
    for k in 0..=q as usize {
        let binom = binomial(2 * q as usize, 2 * k);
        let mu = coeffs.moments[k];
        let a2k = math::powi(a, 2 * k as i32);
        let c_k = binom * math::powi(sep, 2 * (q as i32 - k as i32)) * a2k * mu;
        weighted_sum += k as f64 * c_k;
        if (k as u32) < q {
            slope_sum += (qf - k as f64)
                * binom
                * math::powi(sep, 2 * (q as i32 - k as i32) - 1)
                * a2k
                * mu;
        }
    }

    let a4 = a * a * a * a;
    Ok(VariationalRates {
        scale: 2.0 * a * b,
        chirp: 1.0 / (2.0 * a4) - 2.0 * b * b - lambda * weighted_sum / (two_n_plus_1 * a * a),
        slope: lambda * slope_sum,
        center: state.slope,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Variational energy of the quartic-trap ansatz at its fixed point:
/// `E_n = (2n+1)/(4 a_c^2) + a_c^4 lambda B(n)` with zero chirp.
pub fn ansatz_energy(n: usize, strength: f64) -> Result<f64> {
    if !(strength > 0.0) {
        return Err(invalid_argument(format!(
            "trap strength must be positive, got {strength}"
        )));
    }
    let a_c = scaling_fixed_point(n, 2, strength)?;
    let nf = n as f64;
    Ok((2.0 * nf + 1.0) / (4.0 * a_c * a_c)
        + math::powi(a_c, 4) * strength * quartic_coefficient(n))
}
