use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::ps::{
    standard_ps_deliberate, transition_matrix_from_h, AgentConfig, ClassicalDeliberator, ClipNetwork,
    DeliberationOutcome, FlagSet,
};
use crate::szegedy::{QuantumDeliberator, QuantumParams, ReflectionMode, RetryMode, WalkSpec};

/// Something that picks actions for percepts and learns from rewards.
pub trait Agent {
    fn act(&mut self, percept: usize) -> Result<DeliberationOutcome>;
    fn learn(&mut self, percept: usize, action: usize, rewarded: bool) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    /// Hops from the percept clip straight to an action clip.
    StandardPs,
    ClassicalRps,
    QuantumRps,
}

/// How the quantum agent sizes its reflections; see
/// [`QuantumParams::for_chain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumSettings {
    pub c: u32,
    pub t_const: f64,
    pub reflection_mode: ReflectionMode,
    pub retry_mode: RetryMode,
    pub adaptive: bool,
}

impl Default for QuantumSettings {
    fn default() -> Self {
        Self {
            c: 3,
            t_const: QuantumParams::DEFAULT_T_CONST,
            reflection_mode: ReflectionMode::Approximate,
            retry_mode: RetryMode::Fresh,
            adaptive: false,
        }
    }
}

#[derive(Debug)]
enum Deliberator {
    Classical(ClassicalDeliberator),
    Quantum(QuantumDeliberator),
}

#[derive(Debug)]
struct Cached {
    h_row: Vec<f64>,
    flags: Vec<usize>,
    deliberator: Deliberator,
}

/// A projective-simulation agent: clip network, flags, and one of the three
/// deliberation procedures.
#[derive(Debug)]
pub struct PsAgent {
    kind: AgentKind,
    net: ClipNetwork,
    flags: FlagSet,
    cfg: AgentConfig,
    quantum: QuantumSettings,
    rng: ChaCha8Rng,
    cache: Vec<Option<Cached>>,
}

impl PsAgent {
    pub fn new(kind: AgentKind, net: ClipNetwork, cfg: AgentConfig, quantum: QuantumSettings) -> Result<Self> {
        cfg.validate()?;
        let flags = FlagSet::all(net.num_percepts(), net.num_actions());
        let cache = (0..net.num_percepts()).map(|_| None).collect();
        Ok(Self { kind, net, flags, cfg, quantum, rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed), cache })
    }

    pub fn kind(&self) -> AgentKind {
        self.kind
    }

    pub fn network(&self) -> &ClipNetwork {
        &self.net
    }

    pub fn flags(&self) -> &FlagSet {
        &self.flags
    }

    /// Replaces the network and flags, e.g. to resume from a saved memory.
    pub fn load(&mut self, net: ClipNetwork, flags: FlagSet) -> Result<()> {
        if flags.num_percepts() != net.num_percepts() || flags.num_actions() != net.num_actions() {
            return Err(Error::DimensionMismatch { expected: net.num_percepts(), got: flags.num_percepts() });
        }
        self.cache = (0..net.num_percepts()).map(|_| None).collect();
        self.net = net;
        self.flags = flags;
        Ok(())
    }

    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn deliberator(&mut self, percept: usize) -> Result<&Deliberator> {
        let h_row = self.net.h_row(percept).to_vec();
        let flags = self.flags.flagged(percept).to_vec();
        let stale = match &self.cache[percept] {
            Some(c) => c.h_row != h_row || (self.kind == AgentKind::QuantumRps && c.flags != flags),
            None => true,
        };
        if stale {
            let p = transition_matrix_from_h(&self.net, percept)?;
            let deliberator = match self.kind {
                AgentKind::QuantumRps => {
                    let spec = WalkSpec::new(&p)?;
                    let eps = spec.stationary().mass_of(&flags);
                    let mut params = QuantumParams::for_chain(spec.delta(), eps, self.quantum.c, self.quantum.t_const)?;
                    params.retry_cap = self.cfg.k3;
                    params.reflection_mode = self.quantum.reflection_mode;
                    params.retry_mode = self.quantum.retry_mode;
                    params.adaptive = self.quantum.adaptive;
                    Deliberator::Quantum(QuantumDeliberator::new(&spec, &flags, &params)?)
                }
                _ => Deliberator::Classical(ClassicalDeliberator::new(&p, &self.cfg)?),
            };
            self.cache[percept] = Some(Cached { h_row, flags, deliberator });
        }
        Ok(&self.cache[percept].as_ref().expect("filled above").deliberator)
    }
}

impl Agent for PsAgent {
    fn act(&mut self, percept: usize) -> Result<DeliberationOutcome> {
        let mut ledger = CostLedger::new();
        if self.kind == AgentKind::StandardPs {
            return standard_ps_deliberate(&self.net, percept, &self.flags, &mut self.rng, &mut ledger);
        }
        let flags = self.flags.flagged(percept).to_vec();
        self.deliberator(percept)?;
        let Some(cached) = &self.cache[percept] else { unreachable!("deliberator cached") };
        match &cached.deliberator {
            Deliberator::Classical(d) => d.deliberate(&flags, &mut self.rng, &mut ledger),
            Deliberator::Quantum(d) => d.deliberate(&mut self.rng, &mut ledger),
        }
    }

    fn learn(&mut self, percept: usize, action: usize, rewarded: bool) -> Result<()> {
        self.net = self.net.update_h(&[(percept, action)], rewarded, &self.cfg)?;
        self.flags = self.flags.flag_update(percept, action, rewarded)?;
        Ok(())
    }
}
