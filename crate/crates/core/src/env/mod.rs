//! Task environments, agents and the episode loop.

mod agent;
mod environment;
mod episode;

pub use agent::{Agent, AgentKind, PsAgent, QuantumSettings};
pub use environment::{Environment, EnvironmentSpec, Presentation, SwitchRule};
pub use episode::{run_episode, EpisodeRecord, StepRecord};
