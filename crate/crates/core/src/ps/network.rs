//! Episodic memory: a two-layer clip network of percept and action clips with
//! an h-matrix of edge weights, plus the per-percept reflecting chains derived
//! from it.
//!
//! Clip ids are dense: percepts occupy `0..m`, actions `m..m + n`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::config::AgentConfig;
use super::flags::FlagSet;
use crate::error::{Error, Result};
use crate::markov::{Distribution, StochasticMatrix};

/// How a percept's reflecting chain over the action clips is derived from the
/// h-matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subchain {
    /// Every action clip hops with the percept's own outgoing weights: a
    /// rank-one chain whose stationary distribution is the standard agent's
    /// action distribution.
    ColumnConstant,
    /// As `ColumnConstant`, plus a self-loop on each action clip carrying a
    /// fraction `stay` of its outgoing weight. The stationary distribution is
    /// unchanged and the spectral gap is `1 - stay`.
    Sticky { stay: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipNetwork {
    percepts: Vec<String>,
    actions: Vec<String>,
    /// `h[s][a]`: weight of the edge from percept clip `s` to action clip `a`.
    h: Vec<Vec<f64>>,
    subchain: Subchain,
}

/// Edge from a percept clip to an action clip, by percept and action index.
pub type Edge = (usize, usize);

impl ClipNetwork {
    /// Every percept connected to every action with unit weight.
    pub fn uniform(percepts: usize, actions: usize, subchain: Subchain) -> Result<Self> {
        let percepts: Vec<String> = (0..percepts).map(|s| format!("s{s}")).collect();
        let actions: Vec<String> = (0..actions).map(|a| format!("a{a}")).collect();
        Self::with_labels(percepts, actions, subchain)
    }

    pub fn with_labels(percepts: Vec<String>, actions: Vec<String>, subchain: Subchain) -> Result<Self> {
        if percepts.is_empty() || actions.is_empty() {
            return Err(Error::InvalidInput("network needs at least one percept and one action".into()));
        }
        if let Subchain::Sticky { stay } = subchain {
            if !(0.0..1.0).contains(&stay) {
                return Err(Error::InvalidInput(format!("stay {stay} outside [0, 1)")));
            }
        }
        let h = vec![vec![1.0; actions.len()]; percepts.len()];
        Ok(Self { percepts, actions, h, subchain })
    }

    pub fn num_percepts(&self) -> usize {
        self.percepts.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn percept_labels(&self) -> &[String] {
        &self.percepts
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    pub fn subchain(&self) -> Subchain {
        self.subchain
    }

    pub fn percept_clip(&self, s: usize) -> usize {
        s
    }

    pub fn action_clip(&self, a: usize) -> usize {
        self.percepts.len() + a
    }

    pub fn h(&self, percept: usize, action: usize) -> f64 {
        self.h[percept][action]
    }

    pub fn h_row(&self, percept: usize) -> &[f64] {
        &self.h[percept]
    }

    /// Overwrites one edge weight; weights below one are rejected.
    pub fn set_h(&mut self, percept: usize, action: usize, weight: f64) -> Result<()> {
        if !(weight >= 1.0) {
            return Err(Error::InvalidInput(format!("h weight {weight} below 1")));
        }
        self.h[percept][action] = weight;
        Ok(())
    }

    fn check_percept(&self, percept: usize) -> Result<()> {
        if percept >= self.percepts.len() {
            return Err(Error::InvalidInput(format!("unknown percept {percept}")));
        }
        Ok(())
    }

    /// Hopping probabilities from the percept clip to the action clips.
    pub fn action_probabilities(&self, percept: usize) -> Result<Distribution> {
        self.check_percept(percept)?;
        if self.h[percept].iter().sum::<f64>() <= 0.0 {
            return Err(Error::DanglingClip(self.percept_clip(percept)));
        }
        Distribution::from_weights(&self.h[percept])
    }

    /// Outgoing h-weights of every action clip in the percept's reflecting
    /// subnetwork; row `i` belongs to action clip `i`.
    pub fn subnetwork_weights(&self, percept: usize) -> Result<Vec<Vec<f64>>> {
        self.check_percept(percept)?;
        let row = &self.h[percept];
        let total: f64 = row.iter().sum();
        let self_loop = match self.subchain {
            Subchain::ColumnConstant => 0.0,
            Subchain::Sticky { stay } => stay / (1.0 - stay) * total,
        };
        Ok((0..row.len())
            .map(|i| {
                let mut r = row.clone();
                r[i] += self_loop;
                r
            })
            .collect())
    }

    /// Copy-on-update h-matrix step. Every edge decays by `gamma (h - 1)`;
    /// traversed edges also gain `lambda` when the step was rewarded.
    pub fn update_h(&self, traversed: &[Edge], rewarded: bool, cfg: &AgentConfig) -> Result<Self> {
        cfg.validate()?;
        for &(s, a) in traversed {
            if s >= self.percepts.len() || a >= self.actions.len() {
                return Err(Error::InvalidInput(format!("edge ({s}, {a}) does not exist")));
            }
        }
        let mut next = self.clone();
        for row in next.h.iter_mut() {
            for w in row.iter_mut() {
                *w -= cfg.gamma * (*w - 1.0);
            }
        }
        if rewarded {
            for &(s, a) in traversed {
                next.h[s][a] += cfg.lambda;
            }
        }
        Ok(next)
    }

    /// Sparse `(from clip, to clip, weight)` triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (s, row) in self.h.iter().enumerate() {
            for (a, &w) in row.iter().enumerate() {
                out.push((self.percept_clip(s), self.action_clip(a), w));
            }
        }
        out
    }

    pub fn to_document(&self, flags: &FlagSet) -> EcmDocument {
        let flags = (0..self.num_percepts())
            .map(|s| (self.percepts[s].clone(), flags.flagged(s).to_vec()))
            .collect();
        EcmDocument {
            percepts: self.percepts.clone(),
            actions: self.actions.clone(),
            h: self.triplets(),
            flags,
            subchain: self.subchain,
        }
    }

    pub fn from_document(doc: &EcmDocument) -> Result<(Self, FlagSet)> {
        let mut net = Self::with_labels(doc.percepts.clone(), doc.actions.clone(), doc.subchain)?;
        let m = net.num_percepts();
        for &(from, to, w) in &doc.h {
            if from >= m || to < m || to >= m + net.num_actions() {
                return Err(Error::InvalidInput(format!("triplet ({from}, {to}) is not a percept-action edge")));
            }
            net.set_h(from, to - m, w)?;
        }
        let mut per_percept = Vec::with_capacity(m);
        for label in &net.percepts {
            let set = doc
                .flags
                .get(label)
                .cloned()
                .unwrap_or_else(|| (0..net.num_actions()).collect());
            per_percept.push(set);
        }
        let flags = FlagSet::from_sets(net.num_actions(), per_percept)?;
        Ok((net, flags))
    }
}

/// JSON form of the episodic memory together with its flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmDocument {
    pub percepts: Vec<String>,
    pub actions: Vec<String>,
    /// `(from clip, to clip, weight)` with dense clip ids, percepts first.
    pub h: Vec<(usize, usize, f64)>,
    /// Flagged action indices per percept label.
    pub flags: BTreeMap<String, Vec<usize>>,
    #[serde(default = "default_subchain")]
    pub subchain: Subchain,
}

fn default_subchain() -> Subchain {
    Subchain::ColumnConstant
}

/// Column-stochastic chain whose column `i` is row `i` of `weights`
/// normalized.
pub fn transition_matrix_from_weights(weights: &[Vec<f64>]) -> Result<StochasticMatrix> {
    let n = weights.len();
    if weights.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("weight matrix is not square".into()));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (i, row) in weights.iter().enumerate() {
        let total: f64 = row.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DanglingClip(i));
        }
        for (j, w) in row.iter().enumerate() {
            m[(j, i)] = w / total;
        }
    }
    StochasticMatrix::new(m)
}

/// The percept's reflecting chain over the action clips.
pub fn transition_matrix_from_h(net: &ClipNetwork, percept: usize) -> Result<StochasticMatrix> {
    transition_matrix_from_weights(&net.subnetwork_weights(percept)?)
}

/// Rank-one reflecting analog of the standard agent: every column holds the
/// standard agent's action distribution for the percept.
pub fn simple_rps_from_standard(net: &ClipNetwork, percept: usize) -> Result<StochasticMatrix> {
    Ok(StochasticMatrix::column_constant(&net.action_probabilities(percept)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{is_reversible, spectral_info, stationary_distribution};

    fn cfg(gamma: f64, lambda: f64) -> AgentConfig {
        AgentConfig { gamma, lambda, ..Default::default() }
    }

    #[test]
    fn uniform_network_gives_uniform_columns() {
        let net = ClipNetwork::uniform(1, 2, Subchain::ColumnConstant).unwrap();
        let p = transition_matrix_from_h(&net, 0).unwrap();
        for col in p.columns() {
            assert_eq!(col, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn weights_normalize_per_row() {
        let p = transition_matrix_from_weights(&[vec![1.0, 3.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(p.column(0), vec![0.25, 0.75]);
        assert!(matches!(
            transition_matrix_from_weights(&[vec![1.0, 1.0], vec![0.0, 0.0]]),
            Err(Error::DanglingClip(1))
        ));
    }

    #[test]
    fn rewarded_update_then_normalize() {
        let net = ClipNetwork::uniform(1, 2, Subchain::ColumnConstant).unwrap();
        let net = net.update_h(&[(0, 1)], true, &cfg(0.0, 1.0)).unwrap();
        assert_eq!(net.h_row(0), &[1.0, 2.0]);
        let p = transition_matrix_from_h(&net, 0).unwrap();
        assert!((p.prob(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.prob(1, 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn update_rule_examples() {
        let net = ClipNetwork::uniform(1, 1, Subchain::ColumnConstant).unwrap();
        assert_eq!(net.update_h(&[(0, 0)], true, &cfg(0.0, 1.0)).unwrap().h(0, 0), 2.0);

        let mut net5 = net.clone();
        net5.set_h(0, 0, 5.0).unwrap();
        assert_eq!(net5.update_h(&[(0, 0)], false, &cfg(0.5, 1.0)).unwrap().h(0, 0), 3.0);

        for gamma in [0.0, 0.3, 1.0] {
            assert_eq!(net.update_h(&[(0, 0)], false, &cfg(gamma, 1.0)).unwrap().h(0, 0), 1.0);
        }
    }

    #[test]
    fn update_rejects_unknown_edges() {
        let net = ClipNetwork::uniform(1, 2, Subchain::ColumnConstant).unwrap();
        assert!(net.update_h(&[(0, 2)], true, &cfg(0.0, 1.0)).is_err());
        assert!(net.update_h(&[(0, 0)], true, &cfg(2.0, 1.0)).is_err());
    }

    #[test]
    fn simple_rps_examples() {
        let net = ClipNetwork::uniform(1, 3, Subchain::ColumnConstant).unwrap();
        let p = simple_rps_from_standard(&net, 0).unwrap();
        for col in p.columns() {
            for x in col {
                assert!((x - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        assert!((spectral_info(&p).unwrap().gap - 1.0).abs() < 1e-12);

        let mut net = net;
        net.set_h(0, 2, 2.0).unwrap();
        let p = simple_rps_from_standard(&net, 0).unwrap();
        assert_eq!(p.column(1), vec![0.25, 0.25, 0.5]);
        let pi = stationary_distribution(&p).unwrap();
        assert!(is_reversible(&p, &pi));
        assert_eq!(p, transition_matrix_from_h(&net, 0).unwrap());
    }

    #[test]
    fn sticky_subchain_keeps_stationary_and_sets_gap() {
        let mut net = ClipNetwork::uniform(1, 4, Subchain::Sticky { stay: 0.75 }).unwrap();
        net.set_h(0, 1, 3.0).unwrap();
        let p = transition_matrix_from_h(&net, 0).unwrap();
        let info = spectral_info(&p).unwrap();
        assert!((info.gap - 0.25).abs() < 1e-12);
        let expected = net.action_probabilities(0).unwrap();
        for i in 0..4 {
            assert!((info.stationary[i] - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn document_round_trip() {
        let mut net = ClipNetwork::uniform(2, 3, Subchain::ColumnConstant).unwrap();
        net.set_h(1, 2, 4.5).unwrap();
        let flags = FlagSet::all(2, 3).flag_update(1, 0, false).unwrap();
        let doc = net.to_document(&flags);
        assert_eq!(doc.h.len(), 6);
        assert!(doc.h.contains(&(1, 4, 4.5)));
        let text = serde_json::to_string(&doc).unwrap();
        let back: EcmDocument = serde_json::from_str(&text).unwrap();
        let (net2, flags2) = ClipNetwork::from_document(&back).unwrap();
        assert_eq!(net2, net);
        assert_eq!(flags2, flags);
    }
}
