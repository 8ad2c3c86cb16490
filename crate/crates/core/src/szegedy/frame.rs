//! Exact simulation of approximate reflections without the ancilla space.
//!
//! Write `W = Q diag(e^{i phi_m}) Q^dagger`. On eigenvector `q_m`, the
//! reflection acts on the ancillas as the reflection about
//! `f_m = v_m^{(x)k}`, where `v_m[y] = (1/N) sum_x e^{-i x phi_m}
//! (-1)^{x.y}` with `N = 2^s`. Starting from clean ancillas, the ancilla part
//! of every eigencomponent therefore stays in the span of
//! `g_0 = |0...0>` and `g_{m+1} = f_m`, so a state is a `D x (D+1)` matrix of
//! coefficients together with the Gram matrix `G_ab = <g_a|g_b>`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::walk::WalkSpec;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone)]
pub(crate) struct Eigenframe {
    n: usize,
    q: DMatrix<Complex64>,
    q_adj: DMatrix<Complex64>,
    #[cfg_attr(not(test), allow(dead_code))]
    phases: Vec<f64>,
    gram: DMatrix<Complex64>,
    gram_t: DMatrix<Complex64>,
}

/// Coefficients `alpha[m, b]` of `q_m (x) g_b`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FrameState {
    alpha: DMatrix<Complex64>,
}

impl FrameState {
    pub(crate) fn bytes(&self) -> usize {
        self.alpha.len() * std::mem::size_of::<Complex64>()
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for t in start..start + h {
                let (a, b) = (v[t], v[t + h]);
                v[t] = a + b;
                v[t + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `v[y] = (1/N) sum_x e^{-i x phi} (-1)^{popcount(x & y)}`.
fn round_frame(phi: f64, s: u32) -> Vec<Complex64> {
    let big_n = 1usize << s;
    let mut v: Vec<Complex64> = (0..big_n).map(|x| Complex64::from_polar(1.0 / big_n as f64, -(x as f64) * phi)).collect();
    walsh_hadamard(&mut v);
    v
}

impl Eigenframe {
    pub(crate) fn new(spec: &WalkSpec, k: u32, s: u32) -> Result<Self> {
        if s > 16 || k == 0 || s == 0 {
            return Err(Error::InvalidInput(format!("unsupported ancilla layout k={k}, s={s}")));
        }
        let dim = spec.n() * spec.n();
        let w = spec.walk_matrix().map(|x| Complex64::new(x, 0.0));
        // degenerate spectra sometimes stall the QR sweep at the tightest
        // tolerance
        let (q, t) = [1e-15, 1e-13, 1e-11]
            .iter()
            .find_map(|&eps| w.clone().try_schur(eps, 100_000))
            .ok_or_else(|| Error::NumericalFailure("walk eigenbasis did not converge".into()))?
            .unpack();
        let mut off = 0.0f64;
        for c in 0..dim {
            for r in 0..c {
                off = off.max(t[(r, c)].norm());
            }
        }
        if off > 1e-8 {
            return Err(Error::NumericalFailure(format!("walk operator not diagonalized ({off:e})")));
        }
        let phases: Vec<f64> = (0..dim).map(|m| t[(m, m)].arg()).collect();
        let frames: Vec<Vec<Complex64>> = phases.iter().map(|&phi| round_frame(phi, s)).collect();
        let kk = k as i32;
        let mut gram = DMatrix::from_element(dim + 1, dim + 1, ZERO);
        gram[(0, 0)] = Complex64::new(1.0, 0.0);
        for a in 0..dim {
            let e = frames[a][0].powi(kk);
            gram[(0, a + 1)] = e;
            gram[(a + 1, 0)] = e.conj();
            for b in a..dim {
                let dot: Complex64 = frames[a].iter().zip(&frames[b]).map(|(x, y)| x.conj() * y).sum();
                let g = dot.powi(kk);
                gram[(a + 1, b + 1)] = g;
                gram[(b + 1, a + 1)] = g.conj();
            }
        }
        let gram_t = gram.transpose();
        let q_adj = q.adjoint();
        Ok(Self { n: spec.n(), q, q_adj, phases, gram, gram_t })
    }

    pub(crate) fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Node amplitudes with clean ancillas.
    pub(crate) fn from_nodes(&self, node: &[Complex64]) -> FrameState {
        let d = self.dim();
        let mut alpha = DMatrix::from_element(d, d + 1, ZERO);
        let v = &self.q_adj * nalgebra::DVector::from_column_slice(node);
        alpha.set_column(0, &v);
        FrameState { alpha }
    }

    /// Amplitudes in the node basis: row `r` holds the frame coefficients of
    /// node component `r`.
    fn node_coefficients(&self, st: &FrameState) -> DMatrix<Complex64> {
        &self.q * &st.alpha
    }

    fn row_weights(&self, beta: &DMatrix<Complex64>) -> Vec<f64> {
        let y = beta * &self.gram_t;
        (0..beta.nrows())
            .map(|r| (0..beta.ncols()).map(|a| (beta[(r, a)].conj() * y[(r, a)]).re).sum::<f64>().max(0.0))
            .collect()
    }

    pub(crate) fn negate_flagged(&self, st: &mut FrameState, mask: &[bool]) {
        let mut beta = self.node_coefficients(st);
        for r in 0..beta.nrows() {
            if mask[r / self.n] {
                for c in 0..beta.ncols() {
                    beta[(r, c)] = -beta[(r, c)];
                }
            }
        }
        st.alpha = &self.q_adj * beta;
    }

    pub(crate) fn reflect(&self, st: &mut FrameState) {
        let d = self.dim();
        for m in 0..d {
            let mut overlap = ZERO;
            for b in 0..=d {
                overlap += self.gram[(m + 1, b)] * st.alpha[(m, b)];
            }
            for b in 0..=d {
                st.alpha[(m, b)] = -st.alpha[(m, b)];
            }
            st.alpha[(m, m + 1)] += overlap * 2.0;
        }
    }

    #[cfg(test)]
    pub(crate) fn norm_sqr(&self, st: &FrameState) -> f64 {
        self.row_weights(&st.alpha).iter().sum()
    }

    pub(crate) fn first_register_probabilities(&self, st: &FrameState) -> Vec<f64> {
        let weights = self.row_weights(&self.node_coefficients(st));
        let mut probs = vec![0.0; self.n];
        for (r, w) in weights.iter().enumerate() {
            probs[r / self.n] += w;
        }
        probs
    }

    /// Projects onto first-register values with `mask[i] == keep` and
    /// renormalizes; returns the branch probability.
    pub(crate) fn project(&self, st: &FrameState, mask: &[bool], keep: bool) -> (f64, FrameState) {
        let mut beta = self.node_coefficients(st);
        for r in 0..beta.nrows() {
            if mask[r / self.n] != keep {
                for c in 0..beta.ncols() {
                    beta[(r, c)] = ZERO;
                }
            }
        }
        let prob: f64 = self.row_weights(&beta).iter().sum();
        let mut alpha = &self.q_adj * beta;
        if prob > 0.0 {
            alpha /= Complex64::new(prob.sqrt(), 0.0);
        }
        (prob, FrameState { alpha })
    }

    /// Full amplitude vector in the dense layout; for cross-checks.
    #[cfg(test)]
    pub(crate) fn to_dense(&self, st: &FrameState, k: u32, s: u32) -> Vec<Complex64> {
        let d = self.dim();
        let big_n = 1usize << s;
        let anc = 1usize << (k * s);
        let mut frames = vec![vec![ZERO; anc]; d + 1];
        frames[0][0] = Complex64::new(1.0, 0.0);
        for m in 0..d {
            let v = round_frame(self.phases[m], s);
            for a in 0..anc {
                let mut amp = Complex64::new(1.0, 0.0);
                for r in 0..k {
                    amp *= v[(a >> (r * s)) & (big_n - 1)];
                }
                frames[m + 1][a] = amp;
            }
        }
        let beta = self.node_coefficients(st);
        let mut out = vec![ZERO; d * anc];
        for a in 0..anc {
            for r in 0..d {
                let mut acc = ZERO;
                for b in 0..=d {
                    acc += beta[(r, b)] * frames[b][a];
                }
                out[a * d + r] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::random_reversible_chain;
    use crate::szegedy::aro::DenseAro;
    use crate::szegedy::walk::negate_flagged;

    #[test]
    fn matches_dense_simulation() {
        for (seed, n, k, s) in [(1u64, 2usize, 1u32, 2u32), (2, 3, 2, 2), (3, 3, 3, 1), (4, 2, 2, 3)] {
            let p = random_reversible_chain(n, seed, Some(0.3)).unwrap();
            let spec = WalkSpec::new(&p).unwrap();
            let frame = Eigenframe::new(&spec, k, s).unwrap();
            let aro = DenseAro::new(&spec, k, s);
            let mask: Vec<bool> = (0..n).map(|i| i == 0).collect();
            let node: Vec<Complex64> = spec.pi_init().iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let mut fs = frame.from_nodes(&node);
            let mut dense = vec![ZERO; (n * n) << (k * s)];
            dense[..n * n].copy_from_slice(&node);
            for _ in 0..4 {
                negate_flagged(&mask, n, &mut dense);
                aro.apply(&mut dense);
                frame.negate_flagged(&mut fs, &mask);
                frame.reflect(&mut fs);
                let recon = frame.to_dense(&fs, k, s);
                let err = recon.iter().zip(&dense).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "seed {seed}: {err}");
                assert!((frame.norm_sqr(&fs) - 1.0).abs() < 1e-10);
                let probs = frame.first_register_probabilities(&fs);
                let mut expected = vec![0.0; n];
                for (t, a) in dense.iter().enumerate() {
                    expected[(t / n) % n] += a.norm_sqr();
                }
                for i in 0..n {
                    assert!((probs[i] - expected[i]).abs() < 1e-10);
                }
            }
            let (p_flag, post) = frame.project(&fs, &mask, true);
            let expected: f64 = dense.iter().enumerate().filter(|(t, _)| mask[(t / n) % n]).map(|(_, a)| a.norm_sqr()).sum();
            assert!((p_flag - expected).abs() < 1e-10);
            assert!((frame.norm_sqr(&post) - 1.0).abs() < 1e-10);
        }
    }
}
