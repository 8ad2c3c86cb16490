//! Projective simulation: clip network, flags, update rules and the classical
//! deliberation procedures.

mod config;
mod deliberate;
mod flags;
mod network;
mod tailed;

pub use config::AgentConfig;
pub use deliberate::{classical_rps_deliberate, standard_ps_deliberate, ClassicalDeliberator, DeliberationOutcome};
pub use flags::FlagSet;
pub use network::{
    simple_rps_from_standard, transition_matrix_from_h, transition_matrix_from_weights, ClipNetwork, EcmDocument,
    Edge, Subchain,
};
pub use tailed::tailed_distribution;
