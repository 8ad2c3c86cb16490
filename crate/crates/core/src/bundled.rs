//! Fixed chains and scenarios shipped with the crate.

use crate::markov::{reversible_chain_with_stationary, Distribution, StochasticMatrix};

/// Stationary distribution of [`six_state_chain`].
pub const SIX_STATE_PI: [f64; 6] = [0.4, 0.3, 0.2, 0.05, 0.03, 0.02];
/// Flagged actions of the six-state scenario: flagged mass 0.1.
pub const SIX_STATE_FLAGS: [usize; 3] = [3, 4, 5];
pub const SIX_STATE_GAP: f64 = 0.25;
const SIX_STATE_SEED: u64 = 6;

/// Reversible six-state chain with stationary distribution [`SIX_STATE_PI`]
/// and spectral gap [`SIX_STATE_GAP`].
pub fn six_state_chain() -> StochasticMatrix {
    let pi = Distribution::new(SIX_STATE_PI.to_vec()).expect("valid distribution");
    reversible_chain_with_stationary(&pi, SIX_STATE_SEED, Some(SIX_STATE_GAP)).expect("bundled chain builds")
}

/// Rank-one chain over four actions with columns `(0.1, 0.2, 0.3, 0.4)`.
pub fn rank_one_chain() -> StochasticMatrix {
    StochasticMatrix::column_constant(&Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).expect("valid distribution"))
}
