//! Quantum diffusion operators `U_P: |i>|0> -> |i>|p_i>` and
//! `V_P: |0>|j> -> |p*_j>|j>`.
//!
//! Each is block diagonal over the untouched register. Block `i` is the
//! Householder reflection taking `|0>` to `sum_j sqrt(P_ji) |j>`, which fixes
//! the completion of the operator off the defined columns.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::QuantumState;
use crate::ledger::CostLedger;
use crate::markov::StochasticMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Diffusion {
    n: usize,
    /// Householder vectors `u_i = e_0 - sqrt(p_i)`, normalized; `None` when
    /// the column is already `|0>`.
    reflectors: Vec<Option<Vec<f64>>>,
}

impl Diffusion {
    pub fn new(p: &StochasticMatrix) -> Self {
        let n = p.n();
        let reflectors = (0..n)
            .map(|i| {
                let mut u: Vec<f64> = p.column(i).iter().map(|x| -x.max(0.0).sqrt()).collect();
                u[0] += 1.0;
                let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-15 {
                    None
                } else {
                    Some(u.into_iter().map(|x| x / norm).collect())
                }
            })
            .collect();
        Self { n, reflectors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `n x n` block for column `i` (symmetric and orthogonal).
    pub fn block(&self, i: usize) -> DMatrix<f64> {
        let mut b = DMatrix::identity(self.n, self.n);
        if let Some(u) = &self.reflectors[i] {
            for r in 0..self.n {
                for c in 0..self.n {
                    b[(r, c)] -= 2.0 * u[r] * u[c];
                }
            }
        }
        b
    }

    /// Applies block `i` to a length-`n` slice read with the given stride.
    fn reflect(&self, i: usize, data: &mut [Complex64], offset: usize, stride: usize) {
        if let Some(u) = &self.reflectors[i] {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, &ut) in u.iter().enumerate() {
                dot += data[offset + t * stride] * ut;
            }
            for (t, &ut) in u.iter().enumerate() {
                data[offset + t * stride] -= dot * (2.0 * ut);
            }
        }
    }

    /// Acts on the second register of an `n^2` node block, controlled by the
    /// first. Self-inverse.
    pub(crate) fn apply_second(&self, node: &mut [Complex64]) {
        for i in 0..self.n {
            self.reflect(i, node, i * self.n, 1);
        }
    }

    /// Acts on the first register, controlled by the second. Self-inverse.
    pub(crate) fn apply_first(&self, node: &mut [Complex64]) {
        for j in 0..self.n {
            self.reflect(j, node, j, self.n);
        }
    }

    /// Dense `U = sum_i |i><i| (x) B_i`.
    pub fn dense_u(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n * n, n * n);
        for i in 0..n {
            let b = self.block(i);
            m.view_mut((i * n, i * n), (n, n)).copy_from(&b);
        }
        m
    }

    /// Dense `V = sum_j B_j (x) |j><j|`.
    pub fn dense_v(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n * n, n * n);
        for j in 0..n {
            let b = self.block(j);
            for r in 0..n {
                for c in 0..n {
                    m[(r * n + j, c * n + j)] = b[(r, c)];
                }
            }
        }
        m
    }
}

/// `U_P` on every ancilla block; one diffusion call.
pub fn apply_diffusion_u(p: &StochasticMatrix, state: &QuantumState, ledger: &mut CostLedger) -> QuantumState {
    let d = Diffusion::new(p);
    let mut out = state.clone();
    let dim = out.node_dim();
    for block in out.amplitudes_mut().chunks_mut(dim) {
        d.apply_second(block);
    }
    ledger.quantum_diffusion_calls += 1;
    out
}

/// `V_P` built from the time-reversed chain `p_star`; one diffusion call.
pub fn apply_diffusion_v(p_star: &StochasticMatrix, state: &QuantumState, ledger: &mut CostLedger) -> QuantumState {
    let d = Diffusion::new(p_star);
    let mut out = state.clone();
    let dim = out.node_dim();
    for block in out.amplitudes_mut().chunks_mut(dim) {
        d.apply_first(block);
    }
    ledger.quantum_diffusion_calls += 1;
    out
}

/// Register swap `|i>|j> -> |j>|i>` as a permutation matrix.
pub fn swap_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            m[(j * n + i, i * n + j)] = 1.0;
        }
    }
    m
}

/// `max |A^T A - I|` entrywise.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let prod = m.transpose() * m;
    let n = prod.nrows();
    (prod - DMatrix::<f64>::identity(n, n)).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{random_reversible_chain, stationary_distribution, time_reversal};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn uniform_chain_spreads_second_register() {
        let p = StochasticMatrix::from_columns(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let mut ledger = CostLedger::new();
        let out = apply_diffusion_u(&p, &QuantumState::basis(2, 0, 0).unwrap(), &mut ledger);
        let h = 0.5f64.sqrt();
        let expected = [c(h), c(h), c(0.0), c(0.0)];
        for (a, b) in out.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(ledger.quantum_diffusion_calls, 1);

        let out = apply_diffusion_v(&p, &QuantumState::basis(2, 0, 0).unwrap(), &mut ledger);
        let expected = [c(h), c(0.0), c(h), c(0.0)];
        for (a, b) in out.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn permutation_chain_moves_to_partner() {
        let p = StochasticMatrix::from_columns(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let mut ledger = CostLedger::new();
        let out = apply_diffusion_u(&p, &QuantumState::basis(2, 0, 0).unwrap(), &mut ledger);
        assert!((out.amplitudes()[1] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn operators_are_orthogonal() {
        for seed in 0..5 {
            let p = random_reversible_chain(2 + seed as usize, seed, None).unwrap();
            let d = Diffusion::new(&p);
            assert!(orthogonality_defect(&d.dense_u()) < 1e-10);
            assert!(orthogonality_defect(&d.dense_v()) < 1e-10);
        }
    }

    #[test]
    fn v_is_swap_conjugate_of_u_for_reversible_chains() {
        let p = random_reversible_chain(4, 3, None).unwrap();
        let pi = stationary_distribution(&p).unwrap();
        let p_star = time_reversal(&p, &pi).unwrap();
        let swap = swap_matrix(4);
        let v = Diffusion::new(&p_star).dense_v();
        let conj = &swap * Diffusion::new(&p).dense_u() * &swap;
        assert!((v - conj).amax() < 1e-12);
    }

    #[test]
    fn matrix_free_matches_dense() {
        let p = random_reversible_chain(3, 8, None).unwrap();
        let d = Diffusion::new(&p);
        let u = d.dense_u();
        let v = d.dense_v();
        let input: Vec<Complex64> = (0..9).map(|t| Complex64::new(t as f64 * 0.1, 1.0 - t as f64 * 0.05)).collect();
        let mut a = input.clone();
        d.apply_second(&mut a);
        let mut b = input.clone();
        d.apply_first(&mut b);
        for r in 0..9 {
            let du: Complex64 = (0..9).map(|c| input[c] * u[(r, c)]).sum();
            let dv: Complex64 = (0..9).map(|c| input[c] * v[(r, c)]).sum();
            assert!((a[r] - du).norm() < 1e-14);
            assert!((b[r] - dv).norm() < 1e-14);
        }
    }
}
