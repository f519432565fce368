//! Error type shared by all modules.

use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input value object no longer satisfies its invariants
    /// (e.g. an orbital set that is not orthonormal).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A stationary-state solve leaked probability into the grid boundary.
    #[error("grid too small: orbital {orbital} has |psi| = {amplitude:.3e} at the boundary (tolerance {tolerance:.1e})")]
    GridTooSmall {
        orbital: usize,
        amplitude: f64,
        tolerance: f64,
    },

    /// Norm drift during time evolution exceeded the allowed tolerance.
    #[error("propagation diverged at step {step}: norm drift {drift:.3e}")]
    PropagationDiverged { step: usize, drift: f64 },

    /// An STA design produced an unusable scaling factor.
    #[error("design infeasible: {0}")]
    DesignInfeasible(String),

    /// A brute-force reference computation failed.
    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// A dense linear-algebra kernel produced a non-finite result.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = core::result::Result<T, CoreError>;

pub(crate) fn invalid_argument(msg: impl core::fmt::Display) -> CoreError {
    CoreError::InvalidArgument(alloc::format!("{msg}"))
}

pub(crate) fn invalid_state(msg: impl core::fmt::Display) -> CoreError {
    CoreError::InvalidState(alloc::format!("{msg}"))
}
