use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog, FitResult};
use super::run_sharded;
use crate::error::{Error, Result};
use crate::markov::{reversible_chain_with_stationary, Distribution};
use crate::ps::{AgentConfig, ClassicalDeliberator};
use crate::sampling::derive_seed;
use crate::szegedy::{QuantumDeliberator, QuantumParams, ReflectionMode, RetryMode, WalkSpec};

/// One ensemble member: a chain on `n` nodes tuned to spectral gap
/// `target_gap`, with flags chosen to carry about `flag_fraction` of the
/// stationary mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePoint {
    pub n: usize,
    pub target_gap: f64,
    pub flag_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub k1: u32,
    pub c: u32,
    pub t_const: f64,
    pub reflection_mode: ReflectionMode,
    pub retry_mode: RetryMode,
    pub quantum_retry_cap: u32,
    pub seed: u64,
}

impl ScalingParams {
    /// Round-cap constant for scaling runs. With the smaller default the
    /// ceiling in `T` flattens the cost curve at large `eps`.
    pub const T_CONST: f64 = 1.5;
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            k1: 4,
            c: 3,
            t_const: Self::T_CONST,
            reflection_mode: ReflectionMode::Approximate,
            retry_mode: RetryMode::Fresh,
            quantum_retry_cap: 64,
            seed: 0,
        }
    }
}

/// Mean costs of both deliberators on one chain. CSV header:
/// `chain_id,n,eps,delta,classical_diffusions,quantum_diffusion_calls,classical_checks,quantum_check_reflections,trials,s,k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub chain_id: u64,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub classical_diffusions: f64,
    pub quantum_diffusion_calls: f64,
    pub classical_checks: f64,
    pub quantum_check_reflections: f64,
    pub trials: u64,
    /// Ancillas per phase-estimation round; the `2^s` step shows up in the
    /// quantum costs as a staircase in `1/delta`.
    pub s: u32,
    pub k: u32,
}

/// Masses proportional to `2^{-i}`, so single nodes carry roughly
/// `1/2, 1/4, ...` of the total.
pub fn geometric_stationary(n: usize) -> Result<Distribution> {
    let w: Vec<f64> = (0..n).map(|i| 0.5f64.powi(i as i32)).collect();
    Distribution::from_weights(&w)
}

/// Adds nodes in order of decreasing mass whenever they keep the total within
/// `1.2 * target`, until the total reaches `0.8 * target`.
pub fn greedy_flags(pi: &Distribution, target: f64) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..pi.len()).collect();
    order.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]));
    let mut flags = Vec::new();
    let mut mass = 0.0;
    for i in order {
        if mass >= 0.8 * target {
            break;
        }
        if mass + pi[i] <= 1.2 * target {
            flags.push(i);
            mass += pi[i];
        }
    }
    if flags.is_empty() || (mass - target).abs() > 0.2 * target {
        return Err(Error::InvalidInput(format!("no flag set within 20% of mass {target}")));
    }
    flags.sort_unstable();
    Ok(flags)
}

/// The default speedup ensemble: 8 nodes, `delta` in `{1, 1/4, 1/16, 1/64}`
/// and `eps` in `{1/2, ..., 1/64}`.
pub fn speedup_ensemble() -> Vec<EnsemblePoint> {
    let mut out = Vec::new();
    for g in 0..4 {
        for e in 1..=6 {
            out.push(EnsemblePoint { n: 8, target_gap: 0.25f64.powi(g), flag_fraction: 0.5f64.powi(e) });
        }
    }
    out
}

/// Runs both deliberators `trials` times on every ensemble chain.
pub fn scaling_experiment(ensemble: &[EnsemblePoint], trials: u64, params: &ScalingParams) -> Result<Vec<ScalingRecord>> {
    if ensemble.is_empty() {
        return Err(Error::InvalidInput("empty ensemble".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    ensemble
        .iter()
        .enumerate()
        .map(|(id, point)| scaling_record(id as u64, point, trials, params))
        .collect()
}

fn scaling_record(id: u64, point: &EnsemblePoint, trials: u64, params: &ScalingParams) -> Result<ScalingRecord> {
    let pi = geometric_stationary(point.n)?;
    let p = reversible_chain_with_stationary(&pi, derive_seed(params.seed, &[id]), Some(point.target_gap))?;
    let spec = WalkSpec::new(&p)?;
    let flags = greedy_flags(spec.stationary(), point.flag_fraction)?;
    let eps = spec.stationary().mass_of(&flags);
    let delta = spec.delta();

    let cfg = AgentConfig { k1: params.k1, ..Default::default() };
    let classical = ClassicalDeliberator::new(&p, &cfg)?;
    let (_, c_ledger) = run_sharded(point.n, trials, params.seed, &[id, 0], |rng, ledger| {
        Ok(classical.deliberate(&flags, rng, ledger)?.action)
    })?;

    let mut qp = QuantumParams::for_chain(delta, eps, params.c, params.t_const)?;
    qp.reflection_mode = params.reflection_mode;
    qp.retry_mode = params.retry_mode;
    qp.retry_cap = params.quantum_retry_cap;
    let quantum = QuantumDeliberator::new(&spec, &flags, &qp)?;
    let (_, q_ledger) = run_sharded(point.n, trials, params.seed, &[id, 1], |rng, ledger| {
        Ok(quantum.deliberate(rng, ledger)?.action)
    })?;

    let mean = |x: u64| x as f64 / trials as f64;
    Ok(ScalingRecord {
        chain_id: id,
        n: point.n,
        eps,
        delta,
        classical_diffusions: mean(c_ledger.classical_diffusions),
        quantum_diffusion_calls: mean(q_ledger.quantum_diffusion_calls),
        classical_checks: mean(c_ledger.classical_checks),
        quantum_check_reflections: mean(q_ledger.quantum_check_reflections),
        trials,
        s: qp.s,
        k: qp.k,
    })
}

/// Log-log fits of the mean costs against their predicted scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    /// Quantum diffusion calls against `1/sqrt(eps delta)`.
    pub quantum_calls: FitResult,
    /// Classical diffusions against `1/(eps delta)`.
    pub classical_diffusions: FitResult,
    /// Classical checks against `1/eps`.
    pub classical_checks: FitResult,
    /// Quantum check reflections against `1/sqrt(eps)`.
    pub quantum_reflections: FitResult,
    /// Classical over quantum diffusion cost against `1/sqrt(eps delta)`.
    pub speedup_ratio: FitResult,
}

pub fn summarize_scaling(records: &[ScalingRecord]) -> Result<ScalingSummary> {
    let col = |f: &dyn Fn(&ScalingRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let inv_sqrt_ed = col(&|r| 1.0 / (r.eps * r.delta).sqrt());
    Ok(ScalingSummary {
        quantum_calls: fit_loglog(&inv_sqrt_ed, &col(&|r| r.quantum_diffusion_calls))?,
        classical_diffusions: fit_loglog(&col(&|r| 1.0 / (r.eps * r.delta)), &col(&|r| r.classical_diffusions))?,
        classical_checks: fit_loglog(&col(&|r| 1.0 / r.eps), &col(&|r| r.classical_checks))?,
        quantum_reflections: fit_loglog(&col(&|r| 1.0 / r.eps.sqrt()), &col(&|r| r.quantum_check_reflections))?,
        speedup_ratio: fit_loglog(&inv_sqrt_ed, &col(&|r| r.classical_diffusions / r.quantum_diffusion_calls))?,
    })
}

