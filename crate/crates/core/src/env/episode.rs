use std::io::Write;

use serde::{Deserialize, Serialize};

use super::agent::Agent;
use super::environment::Environment;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub percept: usize,
    pub action: usize,
    pub reward: u8,
    pub internal_ops: u64,
    pub timed_out: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub steps: Vec<StepRecord>,
}

impl EpisodeRecord {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reward_rate(&self) -> f64 {
        self.reward_rate_between(0, self.steps.len())
    }

    /// Mean reward over steps `from..to`.
    pub fn reward_rate_between(&self, from: usize, to: usize) -> f64 {
        let window = &self.steps[from.min(self.steps.len())..to.min(self.steps.len())];
        if window.is_empty() {
            return 0.0;
        }
        window.iter().map(|s| s.reward as f64).sum::<f64>() / window.len() as f64
    }

    pub fn mean_internal_ops(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        self.steps.iter().map(|s| s.internal_ops as f64).sum::<f64>() / self.steps.len() as f64
    }

    pub fn timed_out_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.timed_out).count()
    }

    /// CSV with header `step,percept,action,reward,internal_ops,timed_out`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.steps {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `steps` external time steps: deliberate, act (or time out), reward,
/// learn. A step whose deliberation spends more internal operations than the
/// environment's budget is timed out and teaches the agent nothing.
pub fn run_episode<A: Agent + ?Sized>(agent: &mut A, env: &mut Environment, steps: usize) -> Result<EpisodeRecord> {
    let budget = env.spec().time_budget;
    let mut record = EpisodeRecord { steps: Vec::with_capacity(steps) };
    for step in 0..steps {
        let percept = env.percept();
        let outcome = agent.act(percept)?;
        let ops = outcome.ledger.internal_ops();
        let (action, reward, timed_out) = if budget > 0 && ops > budget {
            let (action, _) = env.time_out();
            (action, 0, true)
        } else {
            let (reward, _) = env.step(outcome.action)?;
            agent.learn(percept, outcome.action, reward == 1)?;
            (outcome.action, reward, false)
        };
        record.steps.push(StepRecord { step: step as u64, percept, action, reward, internal_ops: ops, timed_out });
    }
    Ok(record)
}
