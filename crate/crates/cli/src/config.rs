//! Run configuration: a TOML file whose values command-line flags override.
//!
//! ```toml
//! seed = 1
//!
//! [chain]
//! bundled = "six-state"      # or: file = "chain.json", or: random = { n = 6, gap = 0.25 }
//! flags = [3, 4, 5]
//!
//! [agent]
//! gamma = 0.0
//! lambda = 1.0
//! k1 = 4
//! k3 = 64
//! c = 3
//! t_const = 0.785
//! reflection_mode = "approximate"   # or "ideal"
//! retry_mode = "fresh"              # or "recycle"
//!
//! [bench]
//! trials = 2000
//! t_const = 1.5
//! ensemble = [{ n = 8, target_gap = 1.0, flag_fraction = 0.5 }]
//!
//! [episodes]
//! gamma = 0.01
//! actions = 8
//! stay = 0.999
//! switch_period = 100
//! steps = 10000
//! ```

use std::path::{Path, PathBuf};

use reflectron::bench::{speedup_ensemble, ActiveScenario, EnsemblePoint, ScalingParams};
use reflectron::bundled::{rank_one_chain, six_state_chain, SIX_STATE_FLAGS};
use reflectron::env::QuantumSettings;
use reflectron::markov::{random_reversible_chain, StochasticMatrix};
use reflectron::ps::AgentConfig;
use reflectron::szegedy::{QuantumParams, ReflectionMode, RetryMode};
use reflectron::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub chain: ChainSource,
    #[serde(default)]
    pub agent: AgentSection,
    #[serde(default)]
    pub bench: BenchSection,
    #[serde(default)]
    pub episodes: EpisodeSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSource {
    pub file: Option<PathBuf>,
    pub random: Option<RandomChain>,
    pub bundled: Option<String>,
    pub flags: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomChain {
    pub n: usize,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentSection {
    pub gamma: f64,
    pub lambda: f64,
    pub k1: u32,
    pub k3: u32,
    pub c: u32,
    pub t_const: f64,
    pub reflection_mode: ReflectionMode,
    pub retry_mode: RetryMode,
    pub adaptive: bool,
}

impl Default for AgentSection {
    fn default() -> Self {
        let a = AgentConfig::default();
        let q = QuantumSettings::default();
        Self {
            gamma: a.gamma,
            lambda: a.lambda,
            k1: a.k1,
            k3: a.k3,
            c: q.c,
            t_const: QuantumParams::DEFAULT_T_CONST,
            reflection_mode: q.reflection_mode,
            retry_mode: q.retry_mode,
            adaptive: q.adaptive,
        }
    }
}

impl AgentSection {
    pub fn agent_config(&self, seed: u64) -> AgentConfig {
        AgentConfig { gamma: self.gamma, lambda: self.lambda, k1: self.k1, k3: self.k3, rng_seed: seed }
    }

    pub fn quantum(&self) -> QuantumSettings {
        QuantumSettings {
            c: self.c,
            t_const: self.t_const,
            reflection_mode: self.reflection_mode,
            retry_mode: self.retry_mode,
            adaptive: self.adaptive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub trials: u64,
    pub t_const: f64,
    pub ensemble: Vec<EnsemblePoint>,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self { trials: 2000, t_const: ScalingParams::T_CONST, ensemble: speedup_ensemble() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodeSection {
    /// Learning parameters of the scenario; dissipation must be positive.
    pub gamma: f64,
    pub lambda: f64,
    pub percepts: usize,
    pub actions: usize,
    pub stay: f64,
    pub switch_period: u64,
    pub steps: usize,
    pub env_seed: u64,
    pub calibration_trials: u64,
}

impl Default for EpisodeSection {
    fn default() -> Self {
        let s = ActiveScenario::bundled();
        Self {
            gamma: s.agent.gamma,
            lambda: s.agent.lambda,
            percepts: s.percepts,
            actions: s.actions,
            stay: s.stay,
            switch_period: s.switch_period,
            steps: s.steps,
            env_seed: s.env_seed,
            calibration_trials: s.calibration_trials,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
    }

    /// The chain and its flagged nodes. Without explicit flags the bundled
    /// six-state chain uses its own, and other chains flag node 0.
    pub fn chain(&self) -> Result<(StochasticMatrix, Vec<usize>), Error> {
        let c = &self.chain;
        let sources = c.file.is_some() as u8 + c.random.is_some() as u8 + c.bundled.is_some() as u8;
        if sources > 1 {
            return Err(Error::InvalidInput("give exactly one chain source".into()));
        }
        let (p, default_flags) = if let Some(path) = &c.file {
            let text = std::fs::read_to_string(path)?;
            (StochasticMatrix::from_json(&text)?, vec![0])
        } else if let Some(r) = c.random {
            (random_reversible_chain(r.n, self.seed, r.gap)?, vec![0])
        } else {
            match c.bundled.as_deref().unwrap_or("six-state") {
                "six-state" => (six_state_chain(), SIX_STATE_FLAGS.to_vec()),
                "rank-one" => (rank_one_chain(), vec![0]),
                other => return Err(Error::InvalidInput(format!("unknown bundled chain {other:?}"))),
            }
        };
        let flags = c.flags.clone().unwrap_or(default_flags);
        if flags.is_empty() || flags.iter().any(|&f| f >= p.n()) {
            return Err(Error::InvalidInput(format!("flags {flags:?} invalid for {} nodes", p.n())));
        }
        Ok((p, flags))
    }

    pub fn scenario(&self) -> ActiveScenario {
        let e = &self.episodes;
        let mut s = ActiveScenario::bundled();
        s.percepts = e.percepts;
        s.actions = e.actions;
        s.stay = e.stay;
        s.switch_period = e.switch_period;
        s.steps = e.steps;
        s.env_seed = e.env_seed;
        s.calibration_trials = e.calibration_trials;
        s.agent = AgentConfig { gamma: e.gamma, lambda: e.lambda, ..self.agent.agent_config(self.seed) };
        s.quantum = self.agent.quantum();
        s
    }
}
