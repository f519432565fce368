//! Numerical laboratory for spinless fermions and the Tonks-Girardeau gas in
//! time-dependent power-law traps.
//!
//! The crate is organised around the pipeline of a trap-squeezing experiment:
//!
//! - [`spectral`]: spatial grids, power-law potentials, stationary states of
//!   the single-particle Hamiltonian, and energy statistics of Slater
//!   determinants.
//! - [`propagate`]: split-step Fourier time evolution of orbital sets under a
//!   time-dependent trap strength (quench, linear and sampled ramps).
//! - [`manybody`]: many-body assembly over the Bose-Fermi mapping: overlap
//!   matrices, determinant fidelities, reduced single-particle density
//!   matrices for both statistics, densities and coherence spectra.
//! - [`metrics`]: Schatten norms, trace distances, evolution speeds and
//!   quantum-speed-limit bounds.
//! - [`sta`]: variational shortcut-to-adiabaticity design for power-law trap
//!   compressions via the Ermakov-like scaling equation.
//! - [`oracle`]: brute-force small-N reference implementations used to
//!   validate the fast paths.
//!
//! All quantities are expressed in harmonic-oscillator scaled units: lengths
//! in `sqrt(hbar/(m*omega0))`, times in `1/omega0`, energies in `hbar*omega0`.
//!
//! The crate is `no_std`-compatible (`alloc` required). The default `std`
//! feature enables standard float intrinsics, and `parallel` enables
//! multi-threaded kernel assembly through rayon.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fft;
mod math;
pub mod spectral;

pub mod manybody;
pub mod metrics;
pub mod oracle;
pub mod propagate;
pub mod sta;

pub use error::{CoreError, Result};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
