use serde::{Deserialize, Serialize};

use crate::env::{run_episode, Agent, AgentKind, EpisodeRecord, Environment, EnvironmentSpec, PsAgent, QuantumSettings, SwitchRule};
use crate::error::{Error, Result};
use crate::markov::stationary_distribution;
use crate::ps::{transition_matrix_from_h, AgentConfig, ClipNetwork, FlagSet, Subchain};
use crate::sampling::derive_seed;

/// A policy-switching task in which the environment stops waiting for an
/// answer after a fixed number of internal operations.
///
/// Action subnetworks are sticky with gap `1 - stay`, so deliberation slows
/// down sharply once the agent has unflagged a strongly learned action and
/// the remaining flagged mass is small. The budget is the geometric mean of
/// both agents' mean costs on a reference decision of exactly that kind: one
/// action at the dissipation equilibrium weight `1 + lambda/gamma`, all others
/// at 1, and every action but the strong one flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveScenario {
    pub percepts: usize,
    pub actions: usize,
    pub stay: f64,
    pub switch_period: u64,
    /// External steps per run.
    pub steps: usize,
    pub agent: AgentConfig,
    pub quantum: QuantumSettings,
    pub env_seed: u64,
    /// Deliberations per agent used to measure the reference costs.
    pub calibration_trials: u64,
}

impl ActiveScenario {
    /// The bundled demonstration configuration.
    pub fn bundled() -> Self {
        Self {
            percepts: 1,
            actions: 8,
            stay: 1.0 - 1.0 / 1024.0,
            switch_period: 50,
            steps: 10_000,
            agent: AgentConfig { gamma: 0.02, lambda: 1.0, k1: 4, k3: 64, rng_seed: 11 },
            quantum: QuantumSettings::default(),
            env_seed: 7,
            calibration_trials: 4000,
        }
    }

    pub fn environment(&self, budget: u64) -> Result<Environment> {
        let mut spec = EnvironmentSpec::new(self.percepts, self.actions);
        spec.switch_period = self.switch_period;
        spec.switch_rule = SwitchRule::RandomDerangement;
        spec.time_budget = budget;
        spec.seed = self.env_seed;
        Environment::new(spec)
    }

    pub fn agent(&self, kind: AgentKind) -> Result<PsAgent> {
        let net = ClipNetwork::uniform(self.percepts, self.actions, Subchain::Sticky { stay: self.stay })?;
        PsAgent::new(kind, net, self.agent, self.quantum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveReport {
    pub budget: u64,
    /// Flagged mass and spectral gap of the reference decision.
    pub reference_eps: f64,
    pub reference_delta: f64,
    /// Mean internal operations on the reference decision.
    pub classical_cost: f64,
    pub quantum_cost: f64,
    /// Reward rate over the later half of the budgeted run.
    pub classical_rate: f64,
    pub quantum_rate: f64,
    pub classical_timeouts: usize,
    pub quantum_timeouts: usize,
}

fn reference_decision(sc: &ActiveScenario) -> Result<(ClipNetwork, FlagSet)> {
    if !(sc.agent.gamma > 0.0) {
        return Err(Error::InvalidInput("the reference decision needs gamma > 0".into()));
    }
    let mut net = ClipNetwork::uniform(1, sc.actions, Subchain::Sticky { stay: sc.stay })?;
    net.set_h(0, 0, 1.0 + sc.agent.lambda / sc.agent.gamma)?;
    let flags = FlagSet::from_sets(sc.actions, vec![(1..sc.actions).collect()])?;
    Ok((net, flags))
}

pub fn run_active_scenario(sc: &ActiveScenario) -> Result<ActiveReport> {
    Ok(run_active_scenario_detailed(sc)?.0)
}

/// As [`run_active_scenario`], also returning the budgeted classical and
/// quantum episodes.
pub fn run_active_scenario_detailed(sc: &ActiveScenario) -> Result<(ActiveReport, EpisodeRecord, EpisodeRecord)> {
    if sc.steps < 2 {
        return Err(Error::InvalidInput("need at least 2 steps".into()));
    }
    let reference = reference_decision(sc)?;
    let trials = sc.calibration_trials.max(1);
    let mean_cost = |kind: AgentKind, tag: u64| -> Result<f64> {
        let mut agent = sc.agent(kind)?;
        agent.reseed(derive_seed(sc.agent.rng_seed, &[tag]));
        agent.load(reference.0.clone(), reference.1.clone())?;
        let mut total = 0u64;
        for _ in 0..trials {
            total += agent.act(0)?.ledger.internal_ops();
        }
        Ok(total as f64 / trials as f64)
    };
    let classical_cost = mean_cost(AgentKind::ClassicalRps, 0)?;
    let quantum_cost = mean_cost(AgentKind::QuantumRps, 1)?;
    let p = transition_matrix_from_h(&reference.0, 0)?;
    let pi = stationary_distribution(&p)?;
    let budget = ((classical_cost * quantum_cost).sqrt().round() as u64).max(1);
    let half = sc.steps / 2;
    let run = |kind| run_episode(&mut sc.agent(kind)?, &mut sc.environment(budget)?, sc.steps);
    let c = run(AgentKind::ClassicalRps)?;
    let q = run(AgentKind::QuantumRps)?;
    let report = ActiveReport {
        budget,
        reference_eps: pi.mass_of(reference.1.flagged(0)),
        reference_delta: 1.0 - sc.stay,
        classical_cost,
        quantum_cost,
        classical_rate: c.reward_rate_between(half, sc.steps),
        quantum_rate: q.reward_rate_between(half, sc.steps),
        classical_timeouts: c.timed_out_steps(),
        quantum_timeouts: q.timed_out_steps(),
    };
    Ok((report, c, q))
}
