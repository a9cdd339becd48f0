use thiserror::Error;

/// Errors raised by the simulation kernel and the layers above it.
#[derive(Debug, Error)]
pub enum SimError {
    /// A request would exceed the dense-vector capacity.
    #[error("capacity exceeded: {requested} qubits requested, max is {max}")]
    Capacity { requested: usize, max: usize },

    /// A caller-supplied value is malformed (bad norm, bad index, bad range).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A stated precondition of an operation does not hold for the input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal numerical contract was violated.
    #[error("contract violated: {0}")]
    Contract(String),

    /// A forced measurement branch has (near-)zero probability.
    #[error("invalid branch: outcome {outcome} has probability {probability:.3e}")]
    InvalidBranch { outcome: usize, probability: f64 },
}

pub type Result<T> = std::result::Result<T, SimError>;
