use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Column-stochastic transition matrix: entry `(j, i)` is the probability of
/// moving from node `i` to node `j`, so every column sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    entries: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, &Tolerances::default())
    }

    pub fn with_tolerance(entries: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "{}x{} is not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        for (i, col) in entries.column_iter().enumerate() {
            if let Some(x) = col.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0 + tol.stochastic) {
                return Err(Error::InvalidMatrix(format!("entry {x} in column {i} outside [0,1]")));
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > tol.stochastic {
                return Err(Error::InvalidMatrix(format!("column {i} sums to {sum}")));
            }
        }
        Ok(Self { entries })
    }

    /// Builds the matrix from its columns; `columns[i][j]` is `Prob(j | i)`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidMatrix("ragged columns".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |j, i| columns[i][j]))
    }

    /// Rank-one chain whose every column is `column`.
    pub fn column_constant(column: &Distribution) -> Self {
        let n = column.len();
        let entries = DMatrix::from_fn(n, n, |j, _| column[j]);
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// `Prob(to | from)`.
    pub fn prob(&self, to: usize, from: usize) -> f64 {
        self.entries[(to, from)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.entries.column(i).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.column(i)).collect()
    }

    /// One application of the chain to a vector of masses.
    pub fn apply(&self, mass: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(mass);
        (&self.entries * v).iter().copied().collect()
    }

    /// `P^t` by repeated squaring.
    pub fn power(&self, t: u64) -> DMatrix<f64> {
        let n = self.n();
        let mut result = DMatrix::<f64>::identity(n, n);
        let mut base = self.entries.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| self.entries[(j, i)] > 0.0)
    }

    fn reachable_from(&self, start: usize, reverse: bool) -> Vec<bool> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if reverse { self.entries[(u, v)] } else { self.entries[(v, u)] };
                if edge > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Strong connectivity of the support graph.
    pub fn is_irreducible(&self) -> bool {
        self.reachable_from(0, false).iter().all(|&b| b) && self.reachable_from(0, true).iter().all(|&b| b)
    }

    /// Period one, from the gcd of `level(u) + 1 - level(v)` over all support
    /// edges, with BFS levels rooted at node 0. Only meaningful for
    /// irreducible chains.
    pub fn is_aperiodic(&self) -> bool {
        let n = self.n();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u).collect::<Vec<_>>() {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0usize;
        for u in 0..n {
            if level[u] == usize::MAX {
                continue;
            }
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    continue;
                }
                let d = (level[u] + 1).abs_diff(level[v]);
                g = gcd(g, d);
            }
        }
        g == 1
    }

    pub fn check_ergodic(&self) -> Result<()> {
        if !self.is_irreducible() {
            return Err(Error::NonErgodic("support graph is not strongly connected".into()));
        }
        if !self.is_aperiodic() {
            return Err(Error::NonErgodic("chain is periodic".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChainDocument::from(self)).expect("chain serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChainDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub const COLUMN_STOCHASTIC: &str = "column-stochastic";

/// On-disk form of a chain. `columns[i][j]` is `Prob(j | i)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainDocument {
    pub n: usize,
    pub columns: Vec<Vec<f64>>,
    pub convention: String,
}

impl From<&StochasticMatrix> for ChainDocument {
    fn from(p: &StochasticMatrix) -> Self {
        Self { n: p.n(), columns: p.columns(), convention: COLUMN_STOCHASTIC.to_string() }
    }
}

impl TryFrom<ChainDocument> for StochasticMatrix {
    type Error = Error;

    fn try_from(doc: ChainDocument) -> Result<Self> {
        if doc.convention != COLUMN_STOCHASTIC {
            return Err(Error::InvalidMatrix(format!("unsupported convention {:?}", doc.convention)));
        }
        if doc.columns.len() != doc.n {
            return Err(Error::DimensionMismatch { expected: doc.n, got: doc.columns.len() });
        }
        StochasticMatrix::from_columns(&doc.columns)
    }
}

/// Probability vector over `n` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    mass: Vec<f64>,
}

impl Distribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(x) = mass.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {x} is negative or not finite")));
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > Tolerances::default().stochastic {
            return Err(Error::InvalidDistribution(format!("mass sums to {sum}")));
        }
        Ok(Self { mass })
    }

    /// Normalizes a nonnegative vector with positive total.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be nonnegative with positive sum".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self { mass: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, k: usize) -> Self {
        let mut mass = vec![0.0; n];
        mass[k] = 1.0;
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.mass.iter()
    }

    /// Total mass on a subset of nodes.
    pub fn mass_of(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&i| self.mass[i]).sum()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.mass[i]
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(mass: Vec<f64>) -> Result<Self> {
        Self::new(mass)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3(forward: f64) -> StochasticMatrix {
        // node i moves to i+1 with `forward`, to i-1 otherwise
        let mut m = DMatrix::zeros(3, 3);
        for i in 0..3 {
            m[((i + 1) % 3, i)] = forward;
            m[((i + 2) % 3, i)] = 1.0 - forward;
        }
        StochasticMatrix::new(m).unwrap()
    }

    #[test]
    fn rejects_bad_columns() {
        assert!(StochasticMatrix::from_columns(&[vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::from_columns(&[vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn irreducibility_and_period() {
        let flip = StochasticMatrix::from_columns(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(flip.is_irreducible());
        assert!(!flip.is_aperiodic());
        let identity = StochasticMatrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!identity.is_irreducible());
        assert!(cycle3(0.9).is_aperiodic());
        let pure_cycle = cycle3(1.0);
        assert!(pure_cycle.is_irreducible());
        assert!(!pure_cycle.is_aperiodic());
        assert!(matches!(pure_cycle.check_ergodic(), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn power_matches_repeated_products() {
        let p = cycle3(0.7);
        let mut direct = DMatrix::<f64>::identity(3, 3);
        for _ in 0..13 {
            direct = p.matrix() * direct;
        }
        assert!((p.power(13) - direct).abs().max() < 1e-14);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let p = StochasticMatrix::from_columns(&[vec![0.1, 0.9], vec![1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        let text = p.to_json();
        assert!(text.contains("\"convention\":\"column-stochastic\""));
        let back = StochasticMatrix::from_json(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_other_conventions() {
        let text = r#"{"n":1,"columns":[[1.0]],"convention":"row-stochastic"}"#;
        assert!(StochasticMatrix::from_json(text).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert_eq!(Distribution::from_weights(&[1.0, 3.0]).unwrap().as_slice(), &[0.25, 0.75]);
        assert!(Distribution::from_weights(&[0.0, 0.0]).is_err());
    }
}
