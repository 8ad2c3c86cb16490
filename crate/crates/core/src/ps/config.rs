use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning and deliberation parameters shared by every PS agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Dissipation (forgetfulness) in `[0, 1]`.
    pub gamma: f64,
    /// Reward increment, positive.
    pub lambda: f64,
    /// Mixing precision exponent: chains are mixed to within `e^{-k1}`.
    pub k1: u32,
    /// Cap on repeated quantum deliberation rounds.
    pub k3: u32,
    pub rng_seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self { gamma: 0.0, lambda: 1.0, k1: 4, k3: 64, rng_seed: 0 }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidInput(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidInput(format!("lambda {} must be positive", self.lambda)));
        }
        if self.k1 < 1 || self.k3 < 1 {
            return Err(Error::InvalidInput("k1 and k3 must be at least 1".into()));
        }
        Ok(())
    }
}
