use thiserror::Error;

/// Errors raised across the chain, agent and simulator layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid stochastic matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),
    #[error("chain is not reversible")]
    NotReversible,
    #[error("iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("stationary mass of node {0} is zero")]
    ZeroStationaryMass(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target gap {0} could not be reached")]
    GapUnreachable(f64),
    #[error("clip {0} has no outgoing weight")]
    DanglingClip(usize),
    #[error("flagged set carries zero stationary mass")]
    ZeroFlagMass,
    #[error("deliberation exceeded its retry cap of {0}")]
    RetryCapExceeded(usize),
    #[error("action {action} is not flagged for percept {percept}")]
    ActionNotFlagged { percept: usize, action: usize },
    #[error("ancilla registers are not in the all-zero state")]
    AncillaNotClean,
    #[error("measurement branch probability {0:e} is too small to renormalize")]
    DegenerateBranch(f64),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("state too large: {0} amplitudes")]
    StateTooLarge(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
