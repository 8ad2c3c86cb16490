//! Small sampling and counting helpers shared by the deliberators and the
//! experiment harness.

use rand::Rng;
use sha2::{Digest, Sha256};

/// Draws an index with probability proportional to `weights`.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // roundoff fell past the end; return the last index with positive weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Normalized frequencies of outcome counts.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
}

/// Sampling radius for the variational distance between an empirical
/// distribution over `trials` draws and the exact `probs`:
/// `1/2 sum_i sigmas * sqrt(p_i (1 - p_i) / trials)`.
pub fn binomial_tv_radius(probs: &[f64], trials: u64, sigmas: f64) -> f64 {
    0.5 * probs.iter().map(|p| sigmas * (p * (1.0 - p) / trials as f64).sqrt()).sum::<f64>()
}

/// Per-shard seed derived from a base seed and a tuple of indices.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    for p in parts {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_index_follows_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[sample_index(&[1.0, 0.0, 3.0], &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        let f = frequencies(&counts);
        assert!((f[2] - 0.75).abs() < 0.01);
    }

    #[test]
    fn derived_seeds_differ_per_shard() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
    }

    #[test]
    fn radius_vanishes_for_point_mass() {
        assert_eq!(binomial_tv_radius(&[1.0, 0.0], 10, 3.0), 0.0);
        assert!((binomial_tv_radius(&[0.5, 0.5], 100, 1.0) - 0.05).abs() < 1e-15);
    }
}
