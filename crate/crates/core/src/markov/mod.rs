//! Finite Markov chains: stationary distributions, spectra, reversibility,
//! mixing, and seeded generators.

mod analysis;
mod generate;
mod matrix;

pub use analysis::{
    is_reversible, is_reversible_with, mix, mixing_time_upper_bound, spectral_info, stationary_distribution,
    stationary_distribution_with, time_reversal, variational_distance, SpectralInfo,
};
pub(crate) use analysis::mixing_time_from;
pub use generate::{random_reversible_chain, reversible_chain_with_stationary};
pub use matrix::{ChainDocument, Distribution, StochasticMatrix, COLUMN_STOCHASTIC};
