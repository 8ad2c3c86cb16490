//! Classical and quantum reflecting projective-simulation agents.
//!
//! The crate is layered bottom-up:
//!
//! - [`markov`]: column-stochastic chains, stationary distributions, spectral
//!   gaps and mixing bounds.
//! - [`ps`]: the clip network (h-matrix), flags, the tailed distribution and
//!   the classical deliberation procedures.
//! - [`szegedy`]: state-vector simulation of diffusion operators, the walk
//!   operator, approximate reflections and quantum deliberation.
//! - [`env`]: reward environments and the episode loop.
//! - [`bench`]: ensemble experiments, log-log fits and equivalence tests.

pub mod bench;
pub mod bundled;
pub mod env;
pub mod error;
pub mod ledger;
pub mod markov;
pub mod ps;
pub mod sampling;
pub mod szegedy;
pub mod tolerance;

pub use error::{Error, Result};
pub use ledger::CostLedger;
