//! Approximate reflection about `|pi_init>` by phase estimation: `k` rounds,
//! each a Hadamard layer on `s` ancillas, controlled `W^(2^q)` from ancilla
//! bit `q`, and an inverse Fourier transform. Every component whose ancillas
//! do not all read zero gets phase `-1`, then the rounds are undone.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::QuantumState;
use super::walk::WalkSpec;
use crate::error::{Error, Result};
use crate::ledger::CostLedger;

/// Controlled-walk calls one reflection makes: `2^s - 1` per round, forward
/// and back.
pub fn controlled_walk_calls(k: u32, s: u32) -> u64 {
    2 * k as u64 * ((1u64 << s) - 1)
}

#[derive(Debug, Clone)]
pub(crate) struct DenseAro {
    k: u32,
    s: u32,
    dim: usize,
    /// `W^(2^q)` for `q < s`.
    powers: Vec<DMatrix<f64>>,
    /// Inverse Fourier transform on one round's `2^s` values.
    qft_inv: DMatrix<Complex64>,
}

impl DenseAro {
    pub(crate) fn new(spec: &WalkSpec, k: u32, s: u32) -> Self {
        let mut powers = Vec::with_capacity(s as usize);
        let mut m = spec.walk_matrix().clone();
        for _ in 0..s {
            let next = &m * &m;
            powers.push(m);
            m = next;
        }
        let big_n = 1usize << s;
        let scale = 1.0 / (big_n as f64).sqrt();
        let qft_inv = DMatrix::from_fn(big_n, big_n, |y, x| {
            Complex64::from_polar(scale, -2.0 * PI * ((x * y) % big_n) as f64 / big_n as f64)
        });
        Self { k, s, dim: spec.n() * spec.n(), powers, qft_inv }
    }

    /// Applies the reflection; returns the number of controlled-walk calls.
    pub(crate) fn apply(&self, amps: &mut [Complex64]) -> u64 {
        let mut calls = 0;
        for r in 0..self.k {
            self.hadamard(amps, r);
            calls += self.controlled_powers(amps, r, false);
            self.fourier(amps, r, true);
        }
        for block in amps.chunks_mut(self.dim).skip(1) {
            for a in block.iter_mut() {
                *a = -*a;
            }
        }
        for r in (0..self.k).rev() {
            self.fourier(amps, r, false);
            calls += self.controlled_powers(amps, r, true);
            self.hadamard(amps, r);
        }
        calls
    }

    fn hadamard(&self, amps: &mut [Complex64], round: u32) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let blocks = amps.len() / self.dim;
        for q in 0..self.s {
            let bit = 1usize << (round * self.s + q);
            for a in (0..blocks).filter(|a| a & bit == 0) {
                let (lo, hi) = (a * self.dim, (a | bit) * self.dim);
                for t in 0..self.dim {
                    let (x, y) = (amps[lo + t], amps[hi + t]);
                    amps[lo + t] = (x + y) * h;
                    amps[hi + t] = (x - y) * h;
                }
            }
        }
    }

    fn controlled_powers(&self, amps: &mut [Complex64], round: u32, inverse: bool) -> u64 {
        let blocks = amps.len() / self.dim;
        let mut calls = 0;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.dim];
        for q in 0..self.s {
            let bit = 1usize << (round * self.s + q);
            let m = &self.powers[q as usize];
            for a in (0..blocks).filter(|a| a & bit != 0) {
                let block = &mut amps[a * self.dim..(a + 1) * self.dim];
                buf.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
                if inverse {
                    for (r, out) in buf.iter_mut().enumerate() {
                        for (c, x) in block.iter().enumerate() {
                            *out += x * m[(c, r)];
                        }
                    }
                } else {
                    for (c, x) in block.iter().enumerate() {
                        for (r, out) in buf.iter_mut().enumerate() {
                            *out += x * m[(r, c)];
                        }
                    }
                }
                block.copy_from_slice(&buf);
            }
            calls += 1u64 << q;
        }
        calls
    }

    fn fourier(&self, amps: &mut [Complex64], round: u32, inverse: bool) {
        let big_n = 1usize << self.s;
        let shift = round * self.s;
        let mask = (big_n - 1) << shift;
        let blocks = amps.len() / self.dim;
        let mut gathered = vec![Complex64::new(0.0, 0.0); big_n];
        for rest in (0..blocks).filter(|a| a & mask == 0) {
            for t in 0..self.dim {
                for (x, g) in gathered.iter_mut().enumerate() {
                    *g = amps[(rest | (x << shift)) * self.dim + t];
                }
                for y in 0..big_n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, g) in gathered.iter().enumerate() {
                        let f = if inverse { self.qft_inv[(y, x)] } else { self.qft_inv[(x, y)].conj() };
                        acc += f * g;
                    }
                    amps[(rest | (y << shift)) * self.dim + t] = acc;
                }
            }
        }
    }
}

/// Approximate reflection on a state whose ancillas (`k` rounds of `s`
/// qubits, taken from the state's layout) start in `|0>`. Charges one ARO
/// invocation and four diffusion calls per controlled-walk call.
pub fn approximate_reflection(spec: &WalkSpec, state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
    if state.n() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), got: state.n() });
    }
    if state.k() < 1 || state.s() < 1 {
        return Err(Error::InvalidInput("approximate reflection needs k >= 1 and s >= 1".into()));
    }
    if state.ancilla_leakage() > 1e-10 {
        return Err(Error::AncillaNotClean);
    }
    let mut out = state.clone();
    let calls = DenseAro::new(spec, state.k(), state.s()).apply(out.amplitudes_mut());
    ledger.aro_invocations += 1;
    ledger.quantum_diffusion_calls += 4 * calls;
    Ok(out)
}
