use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),
    #[error("agent index {index} out of range for a ring of {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("ring needs at least 2 agents, got {0}")]
    RingTooSmall(usize),
    #[error("agent {0} coincides with the target")]
    AgentAtTarget(usize),
    #[error("spacing d[{index}] = {value} must be positive")]
    NonPositiveSpacing { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("formation is not admissible")]
    Inadmissible,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("singular matrix")]
    Singular,
    #[error("non-finite state at step {step}, agent {agent}")]
    Diverged { step: usize, agent: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
