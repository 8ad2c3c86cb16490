//! The walk operator `W(P) = (2 Pi_2 - I)(2 Pi_1 - I)`, its spectrum on the
//! walk span, and the single-step reflections used by deliberation.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::diffusion::Diffusion;
use super::state::QuantumState;
use crate::error::{Error, Result};
use crate::ledger::CostLedger;
use crate::markov::{is_reversible, spectral_info, time_reversal, Distribution, StochasticMatrix};

/// Everything the quantum agent needs to know about one reversible chain.
#[derive(Debug, Clone)]
pub struct WalkSpec {
    p: StochasticMatrix,
    p_star: StochasticMatrix,
    pi: Distribution,
    delta: f64,
    chain_eigenvalues: Vec<Complex64>,
    u: Diffusion,
    v: Diffusion,
    w: DMatrix<f64>,
    span: DMatrix<f64>,
    span_eigenvalues: Vec<Complex64>,
    phase_gap: f64,
    pi_init: Vec<f64>,
}

impl WalkSpec {
    pub fn new(p: &StochasticMatrix) -> Result<Self> {
        let info = spectral_info(p)?;
        if !is_reversible(p, &info.stationary) {
            return Err(Error::NotReversible);
        }
        let n = p.n();
        let p_star = time_reversal(p, &info.stationary)?;
        let u = Diffusion::new(p);
        let v = Diffusion::new(&p_star);

        let dim = n * n;
        let mut w = DMatrix::zeros(dim, dim);
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for c in 0..dim {
            col.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            col[c] = Complex64::new(1.0, 0.0);
            walk_step(&u, &v, n, &mut col);
            for r in 0..dim {
                w[(r, c)] = col[r].re;
            }
        }

        let mut gen = DMatrix::zeros(dim, 2 * n);
        for i in 0..n {
            for j in 0..n {
                gen[(i * n + j, i)] = p.prob(j, i).sqrt();
                gen[(i * n + j, n + j)] = p_star.prob(i, j).sqrt();
            }
        }
        // nalgebra's SVD occasionally returns an inaccurate factorization for
        // these tall matrices; the Gram route is safe because the nonzero
        // singular values are at least sqrt(delta)
        let gram = SymmetricEigen::new(gen.transpose() * &gen);
        let mut span_cols = Vec::new();
        for t in 0..gram.eigenvalues.len() {
            let sigma_sq = gram.eigenvalues[t];
            if sigma_sq > 1e-12 {
                span_cols.push(&gen * gram.eigenvectors.column(t) / sigma_sq.sqrt());
            }
        }
        let span = DMatrix::from_columns(&span_cols);

        let restricted = span.transpose() * &w * &span;
        let span_eigenvalues: Vec<Complex64> = restricted
            .clone()
            .try_schur(1e-14, 10_000)
            .ok_or_else(|| Error::NumericalFailure("walk spectrum did not converge".into()))?
            .complex_eigenvalues()
            .iter()
            .copied()
            .collect();
        let mut phases: Vec<f64> = span_eigenvalues.iter().map(|z| z.arg().abs()).collect();
        phases.sort_by(f64::total_cmp);
        // the stationary state is the only eigenvalue 1 on the span
        let phase_gap = phases.get(1).copied().unwrap_or(std::f64::consts::PI);

        let mut pi_init = vec![0.0; dim];
        for i in 0..n {
            for j in 0..n {
                pi_init[i * n + j] = (info.stationary[i] * p.prob(j, i)).sqrt();
            }
        }

        Ok(Self {
            p: p.clone(),
            p_star,
            pi: info.stationary,
            delta: info.gap,
            chain_eigenvalues: info.eigenvalues,
            u,
            v,
            w,
            span,
            span_eigenvalues,
            phase_gap,
            pi_init,
        })
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn chain(&self) -> &StochasticMatrix {
        &self.p
    }

    pub fn time_reversed(&self) -> &StochasticMatrix {
        &self.p_star
    }

    pub fn stationary(&self) -> &Distribution {
        &self.pi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Eigenvalues of the chain, descending by modulus.
    pub fn chain_eigenvalues(&self) -> &[Complex64] {
        &self.chain_eigenvalues
    }

    pub fn phase_gap(&self) -> f64 {
        self.phase_gap
    }

    /// Dense real matrix of `W` on the two node registers.
    pub fn walk_matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Orthonormal basis (columns) of `span{|i>|p_i>} + span{|p*_j>|j>}`.
    pub fn span_basis(&self) -> &DMatrix<f64> {
        &self.span
    }

    /// Eigenvalues of `W` restricted to the walk span.
    pub fn span_eigenvalues(&self) -> &[Complex64] {
        &self.span_eigenvalues
    }

    /// Amplitudes of `|pi_init> = sum_i sqrt(pi_i) |i>|p_i>`.
    pub fn pi_init(&self) -> &[f64] {
        &self.pi_init
    }

    pub fn diffusion_u(&self) -> &Diffusion {
        &self.u
    }

    pub fn diffusion_v(&self) -> &Diffusion {
        &self.v
    }

    pub(crate) fn step(&self, node: &mut [Complex64]) {
        walk_step(&self.u, &self.v, self.n(), node);
    }
}

/// `(2 Pi_2 - I)(2 Pi_1 - I)` on one node block, as four diffusion
/// applications.
fn walk_step(u: &Diffusion, v: &Diffusion, n: usize, node: &mut [Complex64]) {
    u.apply_second(node);
    for (t, a) in node.iter_mut().enumerate() {
        if t % n != 0 {
            *a = -*a;
        }
    }
    u.apply_second(node);
    v.apply_first(node);
    for (t, a) in node.iter_mut().enumerate() {
        if t >= n {
            *a = -*a;
        }
    }
    v.apply_first(node);
}

/// Applies `W` to the node registers of every ancilla block; four diffusion
/// calls.
pub fn walk_operator(spec: &WalkSpec, state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
    if state.n() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), got: state.n() });
    }
    let mut out = state.clone();
    let dim = out.node_dim();
    for block in out.amplitudes_mut().chunks_mut(dim) {
        spec.step(block);
    }
    ledger.quantum_diffusion_calls += 4;
    Ok(out)
}

/// Smallest nonzero eigenphase of `W` on the walk span.
pub fn phase_gap(spec: &WalkSpec) -> f64 {
    spec.phase_gap()
}

/// Phase `-1` on every component whose first register is flagged.
pub fn check_reflection(flagged: &[usize], state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
    let n = state.n();
    if let Some(&a) = flagged.iter().find(|&&a| a >= n) {
        return Err(Error::InvalidInput(format!("flagged node {a} out of range")));
    }
    let mut mask = vec![false; n];
    for &a in flagged {
        mask[a] = true;
    }
    let mut out = state.clone();
    negate_flagged(&mask, n, out.amplitudes_mut());
    ledger.quantum_check_reflections += 1;
    Ok(out)
}

pub(crate) fn negate_flagged(mask: &[bool], n: usize, amps: &mut [Complex64]) {
    for (t, a) in amps.iter_mut().enumerate() {
        if mask[(t / n) % n] {
            *a = -*a;
        }
    }
}

/// Exact `2|pi><pi| - I`; not charged to the ledger.
pub fn ideal_reflection(pi_state: &QuantumState, state: &QuantumState) -> Result<QuantumState> {
    if !pi_state.is_normalized(1e-10) {
        return Err(Error::InvalidInput("reflection axis is not normalized".into()));
    }
    let overlap = pi_state.inner(state)?;
    let mut out = state.clone();
    for (o, p) in out.amplitudes_mut().iter_mut().zip(pi_state.amplitudes()) {
        *o = p * (2.0 * overlap) - *o;
    }
    Ok(out)
}

/// `|pi_init> = U_P |pi>|0>`, with `|pi>` taken as given: one state
/// preparation and one diffusion call.
pub fn prepare_initial_state(spec: &WalkSpec, ledger: &mut CostLedger) -> QuantumState {
    ledger.state_preparations += 1;
    ledger.quantum_diffusion_calls += 1;
    let amps = spec.pi_init().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    QuantumState::from_nodes(spec.n(), amps).expect("pi_init has n^2 entries")
}

/// Rank-one chains need no classical knowledge of `pi`: `U_P |0>|0> =
/// |0>|pi>`, the registers are swapped, and a second `U_P` gives
/// `|pi>|pi> = |pi_init>`.
pub fn prepare_rank_one_state(p: &StochasticMatrix, ledger: &mut CostLedger) -> Result<QuantumState> {
    let first = p.column(0);
    if (1..p.n()).any(|i| p.column(i).iter().zip(&first).any(|(a, b)| (a - b).abs() > 1e-12)) {
        return Err(Error::InvalidInput("chain is not column-constant".into()));
    }
    let n = p.n();
    let d = Diffusion::new(p);
    let mut amps = QuantumState::basis(n, 0, 0)?.amplitudes().to_vec();
    d.apply_second(&mut amps);
    let mut swapped = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            swapped[j * n + i] = amps[i * n + j];
        }
    }
    d.apply_second(&mut swapped);
    ledger.state_preparations += 1;
    ledger.quantum_diffusion_calls += 2;
    QuantumState::from_nodes(n, swapped)
}
