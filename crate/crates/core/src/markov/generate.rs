//! Seeded reversible chains for tests and benchmark ensembles.
//!
//! A base chain is drawn at random and then tuned toward a requested spectral
//! gap along a one-parameter family that keeps the stationary distribution
//! and reversibility intact: lazy mixing with the identity closes the gap,
//! convex mixing with the rank-one chain `pi 1^T` opens it.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::analysis::stationary_distribution;
use super::matrix::{Distribution, StochasticMatrix};
use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 200;

/// Random reversible chain from symmetric positive weights (self-loops
/// included, so the chain is aperiodic).
pub fn random_reversible_chain(n: usize, seed: u64, target_gap: Option<f64>) -> Result<StochasticMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 states, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.gen_range(0.05..1.0);
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    let row_sums: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let p = StochasticMatrix::new(DMatrix::from_fn(n, n, |j, i| w[(i, j)] / row_sums[i]))?;
    match target_gap {
        None => Ok(p),
        Some(gap) => {
            let pi = stationary_distribution(&p)?;
            tune_gap(&p, &pi, gap)
        }
    }
}

/// Random Metropolis chain that is reversible with respect to `pi`.
pub fn reversible_chain_with_stationary(
    pi: &Distribution,
    seed: u64,
    target_gap: Option<f64>,
) -> Result<StochasticMatrix> {
    let n = pi.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 states, got {n}")));
    }
    if let Some(i) = (0..n).find(|&i| pi[i] <= 0.0) {
        return Err(Error::ZeroStationaryMass(i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = rng.gen_range(0.05..1.0);
            q[(i, j)] = x;
            q[(j, i)] = x;
        }
    }
    let scale = (0..n).map(|i| q.row(i).sum()).fold(0.0, f64::max);
    q /= scale;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut stay = 1.0;
        for j in 0..n {
            if i != j {
                let move_prob = q[(j, i)] * (pi[j] / pi[i]).min(1.0);
                m[(j, i)] = move_prob;
                stay -= move_prob;
            }
        }
        m[(i, i)] = stay.max(0.0);
    }
    let p = StochasticMatrix::new(m)?;
    match target_gap {
        None => Ok(p),
        Some(gap) => tune_gap(&p, pi, gap),
    }
}

/// Eigenvalues of a chain reversible with respect to `pi`.
fn reversible_eigenvalues(p: &StochasticMatrix, pi: &Distribution) -> Vec<f64> {
    let n = p.n();
    let a = DMatrix::from_fn(n, n, |j, i| p.prob(j, i) * (pi[i] / pi[j]).sqrt());
    let sym = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Position `x` in `[-1, 1]`: negative values are lazy mixes with weight `-x`
/// on the identity, positive values mix weight `x` of the rank-one chain.
fn family_gap(nontrivial: &[f64], x: f64) -> f64 {
    let modulus = nontrivial
        .iter()
        .map(|&l| if x < 0.0 { (-x + (1.0 + x) * l).abs() } else { ((1.0 - x) * l).abs() })
        .fold(0.0, f64::max);
    1.0 - modulus
}

fn family_member(p: &StochasticMatrix, pi: &Distribution, x: f64) -> Result<StochasticMatrix> {
    let n = p.n();
    let m = if x < 0.0 {
        let stay = -x;
        DMatrix::from_fn(n, n, |j, i| (1.0 - stay) * p.prob(j, i) + if i == j { stay } else { 0.0 })
    } else {
        DMatrix::from_fn(n, n, |j, i| (1.0 - x) * p.prob(j, i) + x * pi[j])
    };
    let mut m = m;
    for mut col in m.column_iter_mut() {
        let s: f64 = col.iter().sum();
        col /= s;
    }
    StochasticMatrix::new(m)
}

fn tune_gap(p: &StochasticMatrix, pi: &Distribution, target: f64) -> Result<StochasticMatrix> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::GapUnreachable(target));
    }
    let ev = reversible_eigenvalues(p, pi);
    let nontrivial = &ev[1..];
    if (family_gap(nontrivial, 1.0) - target).abs() < 1e-13 {
        return family_member(p, pi, 1.0);
    }
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if family_gap(nontrivial, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let achieved = family_gap(nontrivial, hi);
    if (achieved - target).abs() > 0.1 * target {
        return Err(Error::GapUnreachable(target));
    }
    family_member(p, pi, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::analysis::{is_reversible, spectral_info};

    #[test]
    fn two_state_chains_are_reversible() {
        for seed in 0..5 {
            let p = random_reversible_chain(2, seed, None).unwrap();
            let pi = stationary_distribution(&p).unwrap();
            assert!(is_reversible(&p, &pi));
        }
    }

    #[test]
    fn target_gap_is_met() {
        let p = random_reversible_chain(6, 42, Some(0.2)).unwrap();
        let gap = spectral_info(&p).unwrap().gap;
        assert!((0.18..=0.22).contains(&gap), "gap {gap}");
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_reversible_chain(5, 9, Some(0.3)).unwrap(), random_reversible_chain(5, 9, Some(0.3)).unwrap());
        assert_ne!(random_reversible_chain(5, 9, None).unwrap(), random_reversible_chain(5, 10, None).unwrap());
    }

    #[test]
    fn metropolis_chain_keeps_requested_stationary() {
        let pi = Distribution::new(vec![0.5, 0.25, 0.125, 0.0625, 0.0625]).unwrap();
        for gap in [1.0, 0.25, 1.0 / 64.0] {
            let p = reversible_chain_with_stationary(&pi, 3, Some(gap)).unwrap();
            let info = spectral_info(&p).unwrap();
            assert!((info.gap - gap).abs() < 1e-9, "{} vs {gap}", info.gap);
            assert!(is_reversible(&p, &pi));
            for i in 0..pi.len() {
                assert!((info.stationary[i] - pi[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unreachable_gap_is_an_error() {
        assert!(matches!(random_reversible_chain(4, 1, Some(1.5)), Err(Error::GapUnreachable(_))));
        assert!(matches!(random_reversible_chain(4, 1, Some(0.0)), Err(Error::GapUnreachable(_))));
        assert!(random_reversible_chain(1, 1, None).is_err());
    }
}
