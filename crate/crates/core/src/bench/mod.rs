//! Ensemble experiments: cost scaling, behavioral equivalence and the
//! active-learning demonstration.
//!
//! Trials are split into fixed-size shards, each with its own seed derived
//! from `(seed, chain id, agent tag, shard index)`, so results do not depend
//! on how many worker threads run them. `REFLECTRON_THREADS` caps the pool.

mod active;
mod behavior;
mod fit;
mod output;
mod scaling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::sampling::derive_seed;

pub use active::{run_active_scenario, run_active_scenario_detailed, ActiveReport, ActiveScenario};
pub use behavior::{
    behavior_experiment, deliberation_experiment, BehaviorParams, BehaviorReport, DeliberationSummary, Deliberator,
};
pub use fit::{fit_loglog, FitResult};
pub use output::{config_hash, write_scaling_csv, write_summary_json};
pub use scaling::{
    geometric_stationary, greedy_flags, scaling_experiment, speedup_ensemble, summarize_scaling, EnsemblePoint,
    ScalingParams, ScalingRecord, ScalingSummary,
};

pub const THREADS_ENV: &str = "REFLECTRON_THREADS";
const SHARD_TRIALS: u64 = 1024;

/// Worker pool sized by `REFLECTRON_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidInput(format!("{THREADS_ENV}={v} is not a count")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Outcome counts and summed ledger over `trials` independent runs of `trial`.
pub(crate) fn run_sharded<F>(outcomes: usize, trials: u64, seed: u64, key: &[u64], trial: F) -> Result<(Vec<u64>, CostLedger)>
where
    F: Fn(&mut ChaCha8Rng, &mut CostLedger) -> Result<usize> + Sync,
{
    let shards = trials.div_ceil(SHARD_TRIALS);
    let pool = thread_pool()?;
    let parts: Vec<Result<(Vec<u64>, CostLedger)>> = pool.install(|| {
        (0..shards)
            .into_par_iter()
            .map(|shard| {
                let mut parts = key.to_vec();
                parts.push(shard);
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &parts));
                let mut counts = vec![0u64; outcomes];
                let mut ledger = CostLedger::new();
                let len = SHARD_TRIALS.min(trials - shard * SHARD_TRIALS);
                for _ in 0..len {
                    counts[trial(&mut rng, &mut ledger)?] += 1;
                }
                Ok((counts, ledger))
            })
            .collect()
    });
    let mut counts = vec![0u64; outcomes];
    let mut ledger = CostLedger::new();
    for part in parts {
        let (c, l) = part?;
        counts.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        ledger += l;
    }
    Ok((counts, ledger))
}
