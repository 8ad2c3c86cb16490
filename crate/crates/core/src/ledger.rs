use serde::{Deserialize, Serialize};
use std::ops::AddAssign;

/// Counters of primitive operations spent by a deliberation.
///
/// One classical diffusion (an application of the transition matrix) and one
/// call to a quantum diffusion operator `U_P` or `V_P` are counted as the same
/// unit of internal time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CostLedger {
    pub classical_diffusions: u64,
    pub classical_checks: u64,
    pub quantum_diffusion_calls: u64,
    pub quantum_check_reflections: u64,
    pub aro_invocations: u64,
    pub measurements: u64,
    pub state_preparations: u64,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Internal time charged against an environment's budget: every diffusion
    /// of either kind.
    pub fn internal_ops(&self) -> u64 {
        self.classical_diffusions + self.quantum_diffusion_calls
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ledger serializes")
    }
}

impl AddAssign for CostLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.classical_diffusions += rhs.classical_diffusions;
        self.classical_checks += rhs.classical_checks;
        self.quantum_diffusion_calls += rhs.quantum_diffusion_calls;
        self.quantum_check_reflections += rhs.quantum_check_reflections;
        self.aro_invocations += rhs.aro_invocations;
        self.measurements += rhs.measurements;
        self.state_preparations += rhs.state_preparations;
    }
}
