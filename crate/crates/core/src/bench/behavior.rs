use serde::{Deserialize, Serialize};

use super::run_sharded;
use crate::env::QuantumSettings;
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::markov::{variational_distance, Distribution, StochasticMatrix};
use crate::ps::{tailed_distribution, AgentConfig, ClassicalDeliberator};
use crate::sampling::{binomial_tv_radius, frequencies};
use crate::szegedy::{QuantumDeliberator, QuantumParams, WalkSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BehaviorParams {
    pub agent: AgentConfig,
    pub quantum: QuantumSettings,
    pub seed: u64,
}

/// Empirical output distributions of both agents compared with the tailed
/// distribution and with each other. Radii are 3-sigma binomial sampling
/// radii around the tailed distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorReport {
    pub trials: u64,
    pub eps: f64,
    pub tailed: Vec<f64>,
    pub classical_frequencies: Vec<f64>,
    pub quantum_frequencies: Vec<f64>,
    pub tv_classical: f64,
    pub tv_quantum: f64,
    pub tv_between: f64,
    pub radius_classical: f64,
    pub radius_quantum: f64,
    pub radius_between: f64,
    pub classical_cost: CostLedger,
    pub quantum_cost: CostLedger,
}

/// Which deliberation procedure a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deliberator {
    Classical,
    Quantum,
}

/// Empirical output distribution of one deliberator against the tailed
/// distribution, with total costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliberationSummary {
    pub deliberator: Deliberator,
    pub trials: u64,
    pub eps: f64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub tailed: Vec<f64>,
    pub tv: f64,
    /// 3-sigma binomial radius around the tailed distribution.
    pub radius: f64,
    pub cost: CostLedger,
}

impl DeliberationSummary {
    pub fn mean_cost(&self) -> [f64; 7] {
        let c = &self.cost;
        [
            c.classical_diffusions,
            c.classical_checks,
            c.quantum_diffusion_calls,
            c.quantum_check_reflections,
            c.aro_invocations,
            c.measurements,
            c.state_preparations,
        ]
        .map(|x| x as f64 / self.trials as f64)
    }
}

/// Runs one deliberator `trials` times on `p` with flagged actions `flags`.
pub fn deliberation_experiment(
    p: &StochasticMatrix,
    flags: &[usize],
    deliberator: Deliberator,
    trials: u64,
    params: &BehaviorParams,
) -> Result<DeliberationSummary> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let n = p.n();
    let spec = WalkSpec::new(p)?;
    let tailed = tailed_distribution(spec.stationary(), flags)?;
    let eps = spec.stationary().mass_of(flags);
    let (counts, cost) = match deliberator {
        Deliberator::Classical => {
            let d = ClassicalDeliberator::new(p, &params.agent)?;
            run_sharded(n, trials, params.seed, &[0], |rng, ledger| Ok(d.deliberate(flags, rng, ledger)?.action))?
        }
        Deliberator::Quantum => {
            let q = &params.quantum;
            let mut qp = QuantumParams::for_chain(spec.delta(), eps, q.c, q.t_const)?;
            qp.reflection_mode = q.reflection_mode;
            qp.retry_mode = q.retry_mode;
            qp.adaptive = q.adaptive;
            qp.retry_cap = params.agent.k3;
            let d = QuantumDeliberator::new(&spec, flags, &qp)?;
            run_sharded(n, trials, params.seed, &[1], |rng, ledger| Ok(d.deliberate(rng, ledger)?.action))?
        }
    };
    let freq = Distribution::new(frequencies(&counts))?;
    Ok(DeliberationSummary {
        deliberator,
        trials,
        eps,
        tv: variational_distance(&freq, &tailed)?,
        radius: binomial_tv_radius(tailed.as_slice(), trials, 3.0),
        counts,
        frequencies: freq.as_slice().to_vec(),
        tailed: tailed.as_slice().to_vec(),
        cost,
    })
}

pub fn behavior_experiment(
    p: &StochasticMatrix,
    flags: &[usize],
    trials: u64,
    params: &BehaviorParams,
) -> Result<BehaviorReport> {
    if trials < 10_000 {
        return Err(Error::InvalidInput(format!("behavior experiments need at least 10^4 trials, got {trials}")));
    }
    let c = deliberation_experiment(p, flags, Deliberator::Classical, trials, params)?;
    let q = deliberation_experiment(p, flags, Deliberator::Quantum, trials, params)?;
    let cf = Distribution::new(c.frequencies.clone())?;
    let qf = Distribution::new(q.frequencies.clone())?;
    Ok(BehaviorReport {
        trials,
        eps: c.eps,
        tv_classical: c.tv,
        tv_quantum: q.tv,
        tv_between: variational_distance(&cf, &qf)?,
        radius_classical: c.radius,
        radius_quantum: q.radius,
        radius_between: c.radius + q.radius,
        tailed: c.tailed,
        classical_frequencies: c.frequencies,
        quantum_frequencies: q.frequencies,
        classical_cost: c.cost,
        quantum_cost: q.cost,
    })
}
