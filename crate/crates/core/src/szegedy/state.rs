//! State vectors over two node registers plus `k` rounds of `s` ancilla
//! qubits.
//!
//! Amplitude index is `a * n^2 + i * n + j` for ancilla value `a`, first
//! register `i` and second register `j`. Ancilla round `r` occupies bits
//! `r*s .. (r+1)*s` of `a`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::markov::StochasticMatrix;

/// Largest amplitude vector the simulator will allocate.
pub const MAX_AMPLITUDES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    k: u32,
    s: u32,
    amps: Vec<Complex64>,
}

impl QuantumState {
    pub fn zeros(n: usize, k: u32, s: u32) -> Result<Self> {
        let len = state_len(n, k, s)?;
        Ok(Self { n, k, s, amps: vec![Complex64::new(0.0, 0.0); len] })
    }

    /// Basis state `|i>|j>` with clean ancillas.
    pub fn basis(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!("basis |{i}>|{j}> outside {n} nodes")));
        }
        let mut st = Self::zeros(n, 0, 0)?;
        st.amps[i * n + j] = Complex64::new(1.0, 0.0);
        Ok(st)
    }

    /// State without ancillas from `n^2` node amplitudes.
    pub fn from_nodes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: amps.len() });
        }
        Ok(Self { n, k: 0, s: 0, amps })
    }

    pub fn from_amplitudes(n: usize, k: u32, s: u32, amps: Vec<Complex64>) -> Result<Self> {
        let len = state_len(n, k, s)?;
        if amps.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: amps.len() });
        }
        Ok(Self { n, k, s, amps })
    }

    /// Embeds the node part (ancilla value zero) into a register with `k`
    /// rounds of `s` ancillas, all in `|0>`.
    pub fn with_ancillas(&self, k: u32, s: u32) -> Result<Self> {
        let mut out = Self::zeros(self.n, k, s)?;
        let d = self.node_dim();
        out.amps[..d].copy_from_slice(&self.amps[..d]);
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn node_dim(&self) -> usize {
        self.n * self.n
    }

    pub fn ancilla_dim(&self) -> usize {
        1usize << (self.k * self.s)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Node amplitudes attached to ancilla value zero.
    pub fn node_part(&self) -> &[Complex64] {
        &self.amps[..self.node_dim()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() || self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), got: other.amps.len() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Largest amplitude modulus outside ancilla value zero.
    pub fn ancilla_leakage(&self) -> f64 {
        self.amps[self.node_dim()..].iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Born probabilities of the first register.
    pub fn first_register_probabilities(&self) -> Vec<f64> {
        let n = self.n;
        let mut probs = vec![0.0; n];
        for block in self.amps.chunks(n * n) {
            for (i, row) in block.chunks(n).enumerate() {
                probs[i] += row.iter().map(|a| a.norm_sqr()).sum::<f64>();
            }
        }
        probs
    }

    pub fn scale(&mut self, factor: f64) {
        for a in self.amps.iter_mut() {
            *a *= factor;
        }
    }

    /// Header `n, k, s` as 32-bit little-endian, then interleaved real and
    /// imaginary parts as 64-bit little-endian floats.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 16 * self.amps.len());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.k.to_le_bytes());
        out.extend_from_slice(&self.s.to_le_bytes());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 {
            return Err(Error::InvalidInput("state header truncated".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("4 bytes"));
        let (n, k, s) = (word(0) as usize, word(1), word(2));
        let len = state_len(n, k, s)?;
        let body = &bytes[12..];
        if body.len() != 16 * len {
            return Err(Error::DimensionMismatch { expected: 16 * len, got: body.len() });
        }
        let float = |off: usize| f64::from_le_bytes(body[off..off + 8].try_into().expect("8 bytes"));
        let amps = (0..len).map(|m| Complex64::new(float(16 * m), float(16 * m + 8))).collect();
        Ok(Self { n, k, s, amps })
    }

    /// Writes the binary state to `path` and a JSON sidecar next to it
    /// (same path with `.json` appended).
    pub fn save(&self, path: &Path, chain: &StochasticMatrix, seed: u64) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        let meta = StateMetadata {
            n: self.n,
            k: self.k,
            s: self.s,
            chain_sha256: chain_hash(chain),
            seed,
        };
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".json");
        fs::write(sidecar, serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateMetadata {
    pub n: usize,
    pub k: u32,
    pub s: u32,
    pub chain_sha256: String,
    pub seed: u64,
}

/// SHA-256 of the chain's JSON document.
pub fn chain_hash(chain: &StochasticMatrix) -> String {
    hex::encode(Sha256::digest(chain.to_json().as_bytes()))
}

fn state_len(n: usize, k: u32, s: u32) -> Result<usize> {
    let bits = (k as u64) * (s as u64);
    let len = (n as u128 * n as u128) << bits.min(100);
    if n == 0 || bits >= 64 || len > MAX_AMPLITUDES as u128 {
        return Err(Error::StateTooLarge(if len > usize::MAX as u128 { usize::MAX } else { len as usize }));
    }
    Ok(len as usize)
}
