//! Quantum deliberation: prepare `|pi_init>`, apply a random number of
//! (check, reflection) rounds, measure the first register, and retry until a
//! flagged action comes out.
//!
//! The outcome distribution after `t` rounds does not depend on earlier
//! randomness, so it is computed once per `t` (or once per sequence of round
//! counts in recycle mode) and sampled afterwards.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::aro::{controlled_walk_calls, DenseAro};
use super::frame::{Eigenframe, FrameState};
use super::state::QuantumState;
use super::walk::{negate_flagged, WalkSpec};
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::markov::Distribution;
use crate::ps::DeliberationOutcome;
use crate::sampling::sample_index;
use crate::tolerance::{ceil_tol, Tolerances};

/// Dense ancilla simulation is used up to this many amplitudes.
pub const DENSE_AMPLITUDE_LIMIT: usize = 1 << 16;
const RECYCLE_CACHE_BYTES: usize = 1 << 28;
/// Above this flagged mass a direct measurement is already a good sampler.
const DIRECT_MEASUREMENT_MASS: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionMode {
    /// Exact `2|pi_init><pi_init| - I`, free of charge.
    Ideal,
    #[default]
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetryMode {
    /// Every attempt starts from a freshly prepared `|pi_init>`.
    #[default]
    Fresh,
    /// A two-outcome flagged/unflagged measurement replaces the full one; an
    /// unflagged post-measurement state seeds the next attempt.
    Recycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Auto,
    Dense,
    Eigenframe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    /// Ancilla qubits per phase-estimation round.
    pub s: u32,
    /// Phase-estimation rounds per approximate reflection.
    pub k: u32,
    /// Largest number `T` of (check, reflection) rounds.
    pub check_cap: u32,
    pub retry_cap: u32,
    pub reflection_mode: ReflectionMode,
    pub retry_mode: RetryMode,
    /// Grow the round cap geometrically from 1 across attempts, for when the
    /// flagged mass is not known.
    pub adaptive: bool,
    pub backend: Backend,
}

impl QuantumParams {
    pub const DEFAULT_T_CONST: f64 = PI / 4.0;

    /// `s = ceil(log2(1/sqrt(delta))) + 2`, `k = c + ceil(log2(1/sqrt(eps)))`,
    /// `T = ceil(t_const / sqrt(eps))`.
    pub fn for_chain(delta: f64, eps: f64, c: u32, t_const: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidInput(format!("spectral gap {delta} outside (0, 1]")));
        }
        // summed masses can overshoot 1 by roundoff
        let eps = if eps > 1.0 && eps < 1.0 + 1e-9 { 1.0 } else { eps };
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidInput(format!("flagged mass {eps} outside (0, 1]")));
        }
        if !(t_const > 0.0) {
            return Err(Error::InvalidInput(format!("round constant {t_const} must be positive")));
        }
        let s = (ceil_tol((1.0 / delta.sqrt()).log2()).max(0.0) as u32 + 2).max(1);
        let k = (c + ceil_tol((1.0 / eps.sqrt()).log2()).max(0.0) as u32).max(1);
        let check_cap = (ceil_tol(t_const / eps.sqrt()) as u32).max(1);
        Ok(Self {
            s,
            k,
            check_cap,
            retry_cap: 64,
            reflection_mode: ReflectionMode::Approximate,
            retry_mode: RetryMode::Fresh,
            adaptive: false,
            backend: Backend::Auto,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.s < 1 || self.k < 1 || self.check_cap < 1 || self.retry_cap < 1 {
            return Err(Error::InvalidInput("s, k, check cap and retry cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Diffusion calls charged per reflection: four per controlled walk.
    pub fn diffusion_calls_per_reflection(&self) -> u64 {
        match self.reflection_mode {
            ReflectionMode::Ideal => 0,
            ReflectionMode::Approximate => 4 * controlled_walk_calls(self.k, self.s),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Ideal,
    Dense(DenseAro),
    Frame(Eigenframe),
}

#[derive(Debug, Clone)]
enum Register {
    Plain(Vec<Complex64>),
    Frame(FrameState),
}

impl Register {
    fn bytes(&self) -> usize {
        match self {
            Register::Plain(v) => v.len() * std::mem::size_of::<Complex64>(),
            Register::Frame(f) => f.bytes(),
        }
    }
}

#[derive(Debug)]
struct RecycleNode {
    flagged_mass: f64,
    /// First-register distribution on the flagged branch.
    flagged_probs: Vec<f64>,
    unflagged: Option<Register>,
}

#[derive(Debug, Default)]
struct RecycleCache {
    nodes: HashMap<Vec<u32>, Arc<RecycleNode>>,
    bytes: usize,
}

/// Quantum deliberator for one chain and one flag set.
#[derive(Debug)]
pub struct QuantumDeliberator {
    n: usize,
    mask: Vec<bool>,
    eps: f64,
    params: QuantumParams,
    round_cap: u32,
    pi_init: Vec<Complex64>,
    engine: Engine,
    fresh: Vec<Vec<f64>>,
    recycle: Mutex<RecycleCache>,
}

fn plain_probabilities(n: usize, amps: &[Complex64]) -> Vec<f64> {
    let mut probs = vec![0.0; n];
    for (t, a) in amps.iter().enumerate() {
        probs[(t / n) % n] += a.norm_sqr();
    }
    probs
}

impl QuantumDeliberator {
    pub fn new(spec: &WalkSpec, flagged: &[usize], params: &QuantumParams) -> Result<Self> {
        params.validate()?;
        let n = spec.n();
        let mut mask = vec![false; n];
        for &a in flagged {
            if a >= n {
                return Err(Error::InvalidInput(format!("flagged action {a} out of range")));
            }
            mask[a] = true;
        }
        let eps = spec.stationary().mass_of(flagged);
        if !(eps > 0.0) {
            return Err(Error::ZeroFlagMass);
        }
        let round_cap = if eps >= DIRECT_MEASUREMENT_MASS { 0 } else { params.check_cap };
        let engine = match params.reflection_mode {
            ReflectionMode::Ideal => Engine::Ideal,
            ReflectionMode::Approximate => {
                let bits = params.k as u64 * params.s as u64;
                let dense_fits = bits < 40 && ((n * n) as u64) << bits <= DENSE_AMPLITUDE_LIMIT as u64;
                match (params.backend, dense_fits) {
                    (Backend::Dense, _) | (Backend::Auto, true) => {
                        QuantumState::zeros(n, params.k, params.s)?;
                        Engine::Dense(DenseAro::new(spec, params.k, params.s))
                    }
                    _ => Engine::Frame(Eigenframe::new(spec, params.k, params.s)?),
                }
            }
        };
        let pi_init = spec.pi_init().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut me = Self {
            n,
            mask,
            eps,
            params: *params,
            round_cap,
            pi_init,
            engine,
            fresh: Vec::new(),
            recycle: Mutex::new(RecycleCache::default()),
        };
        if params.retry_mode == RetryMode::Fresh {
            let mut reg = me.initial_register();
            let mut fresh = Vec::with_capacity(round_cap as usize + 1);
            fresh.push(me.probabilities(&reg));
            for _ in 0..round_cap {
                me.round(&mut reg);
                fresh.push(me.probabilities(&reg));
            }
            me.fresh = fresh;
        }
        Ok(me)
    }

    pub fn flagged_mass(&self) -> f64 {
        self.eps
    }

    pub fn params(&self) -> &QuantumParams {
        &self.params
    }

    /// Largest round count actually drawn (zero when the flagged mass is
    /// large enough to measure directly).
    pub fn round_cap(&self) -> u32 {
        self.round_cap
    }

    /// First-register distribution after `t` rounds from `|pi_init>` (fresh
    /// mode only).
    pub fn round_distribution(&self, t: u32) -> Option<&[f64]> {
        self.fresh.get(t as usize).map(|v| v.as_slice())
    }

    /// Exact distribution of emitted actions in fresh, non-adaptive mode.
    pub fn emitted_distribution(&self) -> Option<Distribution> {
        if self.params.retry_mode != RetryMode::Fresh || self.params.adaptive {
            return None;
        }
        let mut mass = vec![0.0; self.n];
        for probs in &self.fresh {
            for (i, p) in probs.iter().enumerate() {
                if self.mask[i] {
                    mass[i] += p;
                }
            }
        }
        Distribution::from_weights(&mass).ok()
    }

    fn initial_register(&self) -> Register {
        match &self.engine {
            Engine::Ideal => Register::Plain(self.pi_init.clone()),
            Engine::Dense(_) => {
                let st = QuantumState::from_nodes(self.n, self.pi_init.clone())
                    .and_then(|s| s.with_ancillas(self.params.k, self.params.s))
                    .expect("layout validated at construction");
                Register::Plain(st.amplitudes().to_vec())
            }
            Engine::Frame(f) => Register::Frame(f.from_nodes(&self.pi_init)),
        }
    }

    fn round(&self, reg: &mut Register) {
        match (&self.engine, reg) {
            (Engine::Ideal, Register::Plain(v)) => {
                negate_flagged(&self.mask, self.n, v);
                let overlap: Complex64 = self.pi_init.iter().zip(v.iter()).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in v.iter_mut().zip(&self.pi_init) {
                    *x = p * (2.0 * overlap) - *x;
                }
            }
            (Engine::Dense(aro), Register::Plain(v)) => {
                negate_flagged(&self.mask, self.n, v);
                aro.apply(v);
            }
            (Engine::Frame(f), Register::Frame(st)) => {
                f.negate_flagged(st, &self.mask);
                f.reflect(st);
            }
            _ => unreachable!("register matches engine"),
        }
    }

    fn probabilities(&self, reg: &Register) -> Vec<f64> {
        match (&self.engine, reg) {
            (Engine::Frame(f), Register::Frame(st)) => f.first_register_probabilities(st),
            (_, Register::Plain(v)) => plain_probabilities(self.n, v),
            _ => unreachable!("register matches engine"),
        }
    }

    /// Returns the branch probability and the renormalized branch state.
    fn project(&self, reg: &Register, keep_flagged: bool) -> (f64, Register) {
        match (&self.engine, reg) {
            (Engine::Frame(f), Register::Frame(st)) => {
                let (p, out) = f.project(st, &self.mask, keep_flagged);
                (p, Register::Frame(out))
            }
            (_, Register::Plain(v)) => {
                let mut out = v.clone();
                for (t, a) in out.iter_mut().enumerate() {
                    if self.mask[(t / self.n) % self.n] != keep_flagged {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
                let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
                if p > 0.0 {
                    let scale = 1.0 / p.sqrt();
                    out.iter_mut().for_each(|a| *a *= scale);
                }
                (p, Register::Plain(out))
            }
            _ => unreachable!("register matches engine"),
        }
    }

    fn attempt_cap(&self, attempt: u32) -> u32 {
        if self.params.adaptive {
            let grown = 1u64.checked_shl(attempt).unwrap_or(u64::MAX);
            grown.min(self.round_cap as u64) as u32
        } else {
            self.round_cap
        }
    }

    fn charge_rounds(&self, ledger: &mut CostLedger, t: u32) {
        let t = t as u64;
        ledger.quantum_check_reflections += t;
        if self.params.reflection_mode == ReflectionMode::Approximate {
            ledger.aro_invocations += t;
            ledger.quantum_diffusion_calls += t * self.params.diffusion_calls_per_reflection();
        }
    }

    fn recycle_node(&self, key: &[u32]) -> Result<Arc<RecycleNode>> {
        if let Some(node) = self.recycle.lock().expect("cache lock").nodes.get(key) {
            return Ok(node.clone());
        }
        let mut reg = if key.len() == 1 {
            self.initial_register()
        } else {
            let parent = self.recycle_node(&key[..key.len() - 1])?;
            match &parent.unflagged {
                Some(r) => r.clone(),
                None => return Err(Error::DegenerateBranch(1.0 - parent.flagged_mass)),
            }
        };
        for _ in 0..key[key.len() - 1] {
            self.round(&mut reg);
        }
        let probs = self.probabilities(&reg);
        let flagged_mass: f64 = probs.iter().zip(&self.mask).filter(|(_, &m)| m).map(|(p, _)| p).sum();
        let flagged_probs = probs.iter().zip(&self.mask).map(|(p, &m)| if m { *p } else { 0.0 }).collect();
        let tol = Tolerances::default().branch_probability;
        let unflagged = if 1.0 - flagged_mass >= tol { Some(self.project(&reg, false).1) } else { None };
        let node = Arc::new(RecycleNode { flagged_mass, flagged_probs, unflagged });
        let mut cache = self.recycle.lock().expect("cache lock");
        let size = node.unflagged.as_ref().map_or(0, |r| r.bytes());
        if cache.bytes + size <= RECYCLE_CACHE_BYTES {
            cache.bytes += size;
            cache.nodes.insert(key.to_vec(), node.clone());
        }
        Ok(node)
    }

    pub fn deliberate<R: Rng + ?Sized>(&self, rng: &mut R, ledger: &mut CostLedger) -> Result<DeliberationOutcome> {
        let mut own = CostLedger::new();
        let result = match self.params.retry_mode {
            RetryMode::Fresh => self.deliberate_fresh(rng, &mut own),
            RetryMode::Recycle => self.deliberate_recycle(rng, &mut own),
        };
        *ledger += own;
        result.map(|(action, drawn)| DeliberationOutcome { action, ledger: own, samples_drawn: drawn })
    }

    fn deliberate_fresh<R: Rng + ?Sized>(&self, rng: &mut R, own: &mut CostLedger) -> Result<(usize, u64)> {
        for attempt in 0..self.params.retry_cap {
            own.state_preparations += 1;
            own.quantum_diffusion_calls += 1;
            let t = rng.gen_range(0..=self.attempt_cap(attempt));
            self.charge_rounds(own, t);
            own.measurements += 1;
            let x = sample_index(&self.fresh[t as usize], rng);
            if self.mask[x] {
                return Ok((x, attempt as u64 + 1));
            }
        }
        Err(Error::RetryCapExceeded(self.params.retry_cap as usize))
    }

    fn deliberate_recycle<R: Rng + ?Sized>(&self, rng: &mut R, own: &mut CostLedger) -> Result<(usize, u64)> {
        own.state_preparations += 1;
        own.quantum_diffusion_calls += 1;
        let mut key = Vec::new();
        for attempt in 0..self.params.retry_cap {
            let t = rng.gen_range(0..=self.attempt_cap(attempt));
            key.push(t);
            self.charge_rounds(own, t);
            own.measurements += 1;
            let node = self.recycle_node(&key)?;
            if rng.gen::<f64>() < node.flagged_mass {
                own.measurements += 1;
                return Ok((sample_index(&node.flagged_probs, rng), attempt as u64 + 1));
            }
            if node.unflagged.is_none() {
                return Err(Error::DegenerateBranch(1.0 - node.flagged_mass));
            }
        }
        Err(Error::RetryCapExceeded(self.params.retry_cap as usize))
    }
}

/// One quantum deliberation on `spec` with flagged actions `flagged`.
pub fn quantum_rps_deliberate<R: Rng + ?Sized>(
    spec: &WalkSpec,
    flagged: &[usize],
    params: &QuantumParams,
    rng: &mut R,
    ledger: &mut CostLedger,
) -> Result<DeliberationOutcome> {
    QuantumDeliberator::new(spec, flagged, params)?.deliberate(rng, ledger)
}

/// Samples the first register by the Born rule.
pub fn measure_first_register<R: Rng + ?Sized>(state: &QuantumState, rng: &mut R, ledger: &mut CostLedger) -> usize {
    ledger.measurements += 1;
    sample_index(&state.first_register_probabilities(), rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Flagged,
    Unflagged,
}

/// Two-outcome measurement `{sum_{i in f} |i><i|, rest}` on the first
/// register; returns the branch and the renormalized post-measurement state.
pub fn povm_flag_projection<R: Rng + ?Sized>(
    state: &QuantumState,
    flagged: &[usize],
    rng: &mut R,
) -> Result<(Branch, QuantumState)> {
    let n = state.n();
    let mut mask = vec![false; n];
    for &a in flagged {
        if a >= n {
            return Err(Error::InvalidInput(format!("flagged node {a} out of range")));
        }
        mask[a] = true;
    }
    let probs = state.first_register_probabilities();
    let total: f64 = probs.iter().sum();
    let p_flag: f64 = probs.iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| p).sum::<f64>() / total;
    let branch = if rng.gen::<f64>() < p_flag { Branch::Flagged } else { Branch::Unflagged };
    let keep = branch == Branch::Flagged;
    let p = if keep { p_flag } else { 1.0 - p_flag };
    if p < Tolerances::default().branch_probability {
        return Err(Error::DegenerateBranch(p));
    }
    let mut out = state.clone();
    for (t, a) in out.amplitudes_mut().iter_mut().enumerate() {
        if mask[(t / n) % n] != keep {
            *a = Complex64::new(0.0, 0.0);
        }
    }
    let norm = out.norm();
    out.scale(1.0 / norm);
    Ok((branch, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::{six_state_chain, SIX_STATE_FLAGS};
    use crate::markov::{random_reversible_chain, variational_distance, StochasticMatrix};
    use crate::ps::tailed_distribution;
    use crate::sampling::frequencies;
    use crate::szegedy::walk::prepare_initial_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal(spec: &WalkSpec, eps: f64) -> QuantumParams {
        let mut p = QuantumParams::for_chain(spec.delta(), eps, 3, QuantumParams::DEFAULT_T_CONST).unwrap();
        p.reflection_mode = ReflectionMode::Ideal;
        p
    }

    fn empirical(d: &QuantumDeliberator, n: usize, trials: usize, seed: u64) -> (Distribution, CostLedger) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ledger = CostLedger::new();
        let mut counts = vec![0u64; n];
        for _ in 0..trials {
            counts[d.deliberate(&mut rng, &mut ledger).unwrap().action] += 1;
        }
        (Distribution::new(frequencies(&counts)).unwrap(), ledger)
    }

    #[test]
    fn parameter_formulas() {
        let p = QuantumParams::for_chain(1.0 / 64.0, 1.0 / 64.0, 3, 1.5).unwrap();
        assert_eq!((p.s, p.k, p.check_cap), (5, 6, 12));
        let p = QuantumParams::for_chain(1.0, 0.5, 3, QuantumParams::DEFAULT_T_CONST).unwrap();
        assert_eq!((p.s, p.k, p.check_cap), (2, 4, 2));
        assert!(QuantumParams::for_chain(0.0, 0.5, 3, 1.0).is_err());
    }

    #[test]
    fn no_rounds_gives_stationary_statistics() {
        let p = random_reversible_chain(4, 2, None).unwrap();
        let spec = WalkSpec::new(&p).unwrap();
        let all = [0, 1, 2, 3];
        let d = QuantumDeliberator::new(&spec, &all, &ideal(&spec, 1.0)).unwrap();
        assert_eq!(d.round_cap(), 0);
        let probs = d.round_distribution(0).unwrap();
        for i in 0..4 {
            assert!((probs[i] - spec.stationary()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn single_flag_on_uniform_rank_one_chain() {
        let p = StochasticMatrix::column_constant(&Distribution::uniform(4));
        let spec = WalkSpec::new(&p).unwrap();
        let d = QuantumDeliberator::new(&spec, &[0], &ideal(&spec, 0.25)).unwrap();
        let (emp, _) = empirical(&d, 4, 10_000, 1);
        assert_eq!(emp[0], 1.0);
    }

    #[test]
    fn ideal_mode_reproduces_tailed_distribution() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let target = tailed_distribution(spec.stationary(), &SIX_STATE_FLAGS).unwrap();
        for retry_mode in [RetryMode::Fresh, RetryMode::Recycle] {
            let mut params = ideal(&spec, 0.1);
            params.retry_mode = retry_mode;
            let d = QuantumDeliberator::new(&spec, &SIX_STATE_FLAGS, &params).unwrap();
            if let Some(exact) = d.emitted_distribution() {
                assert!(variational_distance(&exact, &target).unwrap() < 1e-10);
            }
            let (emp, ledger) = empirical(&d, 6, 100_000, 3);
            assert!(variational_distance(&emp, &target).unwrap() <= 0.02);
            assert_eq!(ledger.aro_invocations, 0);
        }
    }

    #[test]
    fn approximate_mode_is_close_to_tailed_distribution() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let target = tailed_distribution(spec.stationary(), &SIX_STATE_FLAGS).unwrap();
        for c in [3u32, 5] {
            let params = QuantumParams::for_chain(spec.delta(), 0.1, c, QuantumParams::DEFAULT_T_CONST).unwrap();
            let d = QuantumDeliberator::new(&spec, &SIX_STATE_FLAGS, &params).unwrap();
            let exact = d.emitted_distribution().unwrap();
            assert!(variational_distance(&exact, &target).unwrap() <= 4.0 * 2f64.powi(1 - c as i32));
        }
    }

    #[test]
    fn backends_agree() {
        let p = random_reversible_chain(3, 4, Some(0.4)).unwrap();
        let spec = WalkSpec::new(&p).unwrap();
        let mut params = QuantumParams::for_chain(spec.delta(), spec.stationary()[0], 1, 1.5).unwrap();
        params.backend = Backend::Dense;
        let dense = QuantumDeliberator::new(&spec, &[0], &params).unwrap();
        params.backend = Backend::Eigenframe;
        let frame = QuantumDeliberator::new(&spec, &[0], &params).unwrap();
        for t in 0..=dense.round_cap() {
            let (a, b) = (dense.round_distribution(t).unwrap(), frame.round_distribution(t).unwrap());
            for i in 0..3 {
                assert!((a[i] - b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cost_law_holds() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let params = QuantumParams::for_chain(spec.delta(), 0.1, 3, QuantumParams::DEFAULT_T_CONST).unwrap();
        let d = QuantumDeliberator::new(&spec, &SIX_STATE_FLAGS, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let out = d.deliberate(&mut rng, &mut CostLedger::new()).unwrap();
            let l = out.ledger;
            let per_round = 4 * params.k as u64 * (1u64 << (params.s + 1));
            assert!(l.quantum_diffusion_calls <= l.state_preparations + l.quantum_check_reflections * per_round);
            assert_eq!(
                l.quantum_diffusion_calls,
                l.state_preparations + l.aro_invocations * params.diffusion_calls_per_reflection()
            );
            assert_eq!(l.measurements, l.state_preparations);
        }
    }

    #[test]
    fn ideal_rounds_stay_in_the_grover_plane() {
        let p = random_reversible_chain(4, 10, Some(0.3)).unwrap();
        let spec = WalkSpec::new(&p).unwrap();
        let flagged = [2usize];
        let eps = spec.stationary()[2];
        let pi = spec.pi_init();
        let tilde: Vec<f64> = (0..16).map(|t| if t / 4 == 2 { pi[t] / eps.sqrt() } else { 0.0 }).collect();
        let perp: Vec<f64> = (0..16).map(|t| if t / 4 == 2 { 0.0 } else { pi[t] / (1.0 - eps).sqrt() }).collect();
        let axis = prepare_initial_state(&spec, &mut CostLedger::new());
        let mut state = axis.clone();
        let mut ledger = CostLedger::new();
        for _ in 0..10 {
            state = crate::szegedy::check_reflection(&flagged, &state, &mut ledger).unwrap();
            state = crate::szegedy::ideal_reflection(&axis, &state).unwrap();
            let a: Complex64 = tilde.iter().zip(state.amplitudes()).map(|(x, y)| y * x).sum();
            let b: Complex64 = perp.iter().zip(state.amplitudes()).map(|(x, y)| y * x).sum();
            let residual: f64 = (0..16)
                .map(|t| (state.amplitudes()[t] - a * tilde[t] - b * perp[t]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual <= 1e-9);
        }
    }

    #[test]
    fn adaptive_schedule_still_samples_tailed_distribution() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let target = tailed_distribution(spec.stationary(), &SIX_STATE_FLAGS).unwrap();
        let mut params = ideal(&spec, 0.1);
        params.adaptive = true;
        let d = QuantumDeliberator::new(&spec, &SIX_STATE_FLAGS, &params).unwrap();
        let (emp, _) = empirical(&d, 6, 20_000, 8);
        assert!(variational_distance(&emp, &target).unwrap() <= 0.03);
    }

    #[test]
    fn seeded_runs_repeat() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let params = QuantumParams::for_chain(spec.delta(), 0.1, 3, QuantumParams::DEFAULT_T_CONST).unwrap();
        let d = QuantumDeliberator::new(&spec, &SIX_STATE_FLAGS, &params).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| d.deliberate(&mut rng, &mut CostLedger::new()).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
    }

    #[test]
    fn povm_examples() {
        let spec = WalkSpec::new(&six_state_chain()).unwrap();
        let pi = prepare_initial_state(&spec, &mut CostLedger::new());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut flagged_hits = 0;
        for _ in 0..2000 {
            let (branch, post) = povm_flag_projection(&pi, &SIX_STATE_FLAGS, &mut rng).unwrap();
            assert!((post.norm() - 1.0).abs() < 1e-10);
            if branch == Branch::Flagged {
                flagged_hits += 1;
            }
        }
        let probs = pi.first_register_probabilities();
        let mass: f64 = SIX_STATE_FLAGS.iter().map(|&i| probs[i]).sum();
        assert!((mass - 0.1).abs() < 1e-10);
        assert!((flagged_hits as f64 / 2000.0 - 0.1).abs() < 0.03);
        let all: Vec<usize> = (0..6).collect();
        for _ in 0..10 {
            assert_eq!(povm_flag_projection(&pi, &all, &mut rng).unwrap().0, Branch::Flagged);
        }
    }

    #[test]
    fn measurement_examples() {
        let p = StochasticMatrix::column_constant(&Distribution::uniform(4));
        let spec = WalkSpec::new(&p).unwrap();
        let mut ledger = CostLedger::new();
        let point = QuantumState::basis(4, 0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(measure_first_register(&point, &mut rng, &mut ledger), 0);
        let pi = prepare_initial_state(&spec, &mut ledger);
        let mut counts = vec![0u64; 4];
        for _ in 0..100_000 {
            counts[measure_first_register(&pi, &mut rng, &mut ledger)] += 1;
        }
        for f in frequencies(&counts) {
            assert!((f - 0.25).abs() < 0.01);
        }
        assert_eq!(ledger.measurements, 100_001);
        let seq = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| measure_first_register(&pi, &mut rng, &mut CostLedger::new())).collect::<Vec<_>>()
        };
        assert_eq!(seq(9), seq(9));
    }
}
