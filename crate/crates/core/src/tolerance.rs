//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Column sums of a stochastic matrix and mass of a distribution.
    pub stochastic: f64,
    /// Residual `|P pi - pi|` of a stationary distribution.
    pub stationary: f64,
    /// Detailed balance `|pi_i P_ji - pi_j P_ij|`.
    pub reversibility: f64,
    /// Leading eigenvalue distance from one.
    pub leading_eigenvalue: f64,
    /// Norm of a quantum state.
    pub state_norm: f64,
    /// Smallest branch probability that can still be renormalized.
    pub branch_probability: f64,
    /// Dense eigendecomposition is used up to this many states.
    pub dense_limit: usize,
    /// Power-iteration step cap beyond the dense limit.
    pub power_iteration_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stochastic: 1e-12,
            stationary: 1e-10,
            reversibility: 1e-10,
            leading_eigenvalue: 1e-10,
            state_norm: 1e-10,
            branch_probability: 1e-14,
            dense_limit: 64,
            power_iteration_cap: 1_000_000,
        }
    }
}

/// Ceiling that ignores floating-point noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9).ceil()
}
