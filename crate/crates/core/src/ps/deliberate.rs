//! Classical deliberation: the standard hopping agent with flags and the
//! reflecting agent that mixes its chain, then samples until a flagged action
//! turns up.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::AgentConfig;
use super::flags::FlagSet;
use super::network::ClipNetwork;
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::markov::{is_reversible, mixing_time_from, spectral_info, Distribution, StochasticMatrix};
use crate::sampling::sample_index;
use crate::tolerance::ceil_tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliberationOutcome {
    pub action: usize,
    /// Cost of this deliberation alone.
    pub ledger: CostLedger,
    /// Candidate actions drawn before one was accepted, the accepted one
    /// included.
    pub samples_drawn: u64,
}

/// Loop cap for an acceptance probability `eps`.
pub(crate) fn retry_cap(eps: f64) -> u64 {
    ceil_tol(64.0 / eps) as u64
}

/// Mixed-chain sampler for one reflecting chain. Building it computes the
/// stationary distribution, the mixing time `t_mix` for precision `e^{-k1}`,
/// and `P^{t_mix}` once, so repeated deliberations only sample.
#[derive(Debug, Clone)]
pub struct ClassicalDeliberator {
    pi: Distribution,
    t_mix: u64,
    mixed: DMatrix<f64>,
    start: Distribution,
}

impl ClassicalDeliberator {
    /// Uses the uniform distribution as the fixed starting distribution.
    pub fn new(p: &StochasticMatrix, cfg: &AgentConfig) -> Result<Self> {
        Self::with_start(p, cfg, Distribution::uniform(p.n()))
    }

    pub fn with_start(p: &StochasticMatrix, cfg: &AgentConfig, start: Distribution) -> Result<Self> {
        cfg.validate()?;
        if start.len() != p.n() {
            return Err(Error::DimensionMismatch { expected: p.n(), got: start.len() });
        }
        let info = spectral_info(p)?;
        if !is_reversible(p, &info.stationary) {
            return Err(Error::NotReversible);
        }
        let t_mix = mixing_time_from(&info.stationary, info.gap, (-(cfg.k1 as f64)).exp())?;
        Ok(Self { pi: info.stationary, t_mix, mixed: p.power(t_mix), start })
    }

    pub fn stationary(&self) -> &Distribution {
        &self.pi
    }

    pub fn t_mix(&self) -> u64 {
        self.t_mix
    }

    pub fn deliberate<R: Rng + ?Sized>(
        &self,
        flagged: &[usize],
        rng: &mut R,
        ledger: &mut CostLedger,
    ) -> Result<DeliberationOutcome> {
        let n = self.pi.len();
        let mut mask = vec![false; n];
        for &a in flagged {
            if a >= n {
                return Err(Error::InvalidInput(format!("flagged action {a} out of range")));
            }
            mask[a] = true;
        }
        let eps = self.pi.mass_of(flagged);
        if !(eps > 0.0) {
            return Err(Error::ZeroFlagMass);
        }
        let cap = retry_cap(eps);
        let mut own = CostLedger::new();
        let mut y = sample_index(self.start.as_slice(), rng);
        for drawn in 1..=cap {
            let column = self.mixed.column(y);
            own.classical_diffusions += self.t_mix;
            y = sample_index(column.as_slice(), rng);
            own.classical_checks += 1;
            if mask[y] {
                *ledger += own;
                return Ok(DeliberationOutcome { action: y, ledger: own, samples_drawn: drawn });
            }
        }
        *ledger += own;
        Err(Error::RetryCapExceeded(cap as usize))
    }
}

/// One reflecting-agent deliberation on chain `p`.
pub fn classical_rps_deliberate<R: Rng + ?Sized>(
    p: &StochasticMatrix,
    flagged: &[usize],
    cfg: &AgentConfig,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<DeliberationOutcome> {
    ClassicalDeliberator::new(p, cfg)?.deliberate(flagged, rng, ledger)
}

/// Standard agent with flags: hop from the percept clip to an action clip;
/// an unflagged hit restarts the walk.
pub fn standard_ps_deliberate<R: Rng + ?Sized>(
    net: &ClipNetwork,
    percept: usize,
    flags: &FlagSet,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<DeliberationOutcome> {
    let probs = net.action_probabilities(percept)?;
    let mask = flags.mask(percept);
    let eps = probs.mass_of(flags.flagged(percept));
    if !(eps > 0.0) {
        return Err(Error::ZeroFlagMass);
    }
    let cap = retry_cap(eps);
    let mut own = CostLedger::new();
    for drawn in 1..=cap {
        let a = sample_index(probs.as_slice(), rng);
        own.classical_diffusions += 1;
        own.classical_checks += 1;
        if mask[a] {
            *ledger += own;
            return Ok(DeliberationOutcome { action: a, ledger: own, samples_drawn: drawn });
        }
    }
    *ledger += own;
    Err(Error::RetryCapExceeded(cap as usize))
}
