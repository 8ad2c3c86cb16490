//! State-vector simulation of the quantum reflecting agent: diffusion
//! operators, the Szegedy walk, approximate reflections and quantum
//! deliberation.

mod aro;
mod deliberate;
mod diffusion;
mod frame;
mod state;
mod walk;

pub use aro::{approximate_reflection, controlled_walk_calls};
pub use deliberate::{
    measure_first_register, povm_flag_projection, quantum_rps_deliberate, Backend, Branch, QuantumDeliberator,
    QuantumParams, ReflectionMode, RetryMode, DENSE_AMPLITUDE_LIMIT,
};
pub use diffusion::{apply_diffusion_u, apply_diffusion_v, orthogonality_defect, swap_matrix, Diffusion};
pub use state::{chain_hash, QuantumState, StateMetadata, MAX_AMPLITUDES};
pub use walk::{
    check_reflection, ideal_reflection, phase_gap, prepare_initial_state, prepare_rank_one_state, walk_operator,
    WalkSpec,
};
