use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An index or length does not fit the object it is used with.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A register was requested above the configured qubit cap.
    #[error("qubit capacity exceeded: requested {requested} qubits, cap is {cap} (override via {env})")]
    Capacity {
        requested: usize,
        cap: usize,
        env: &'static str,
    },

    /// A parameter vector does not match the shape a circuit expects.
    #[error("parameter shape mismatch: {0}")]
    ParamShape(String),

    /// A gate that cannot be differentiated carries a trainable angle.
    #[error("unsupported gate for differentiation: {0}")]
    UnsupportedGate(String),

    /// A circuit was requested with fewer layers than its encoding needs.
    #[error("insufficient layers: {0}")]
    InsufficientLayers(String),

    /// A circuit description violates a structural rule.
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A training step produced a non-finite loss or gradient.
    #[error("training error: {0}")]
    Training(String),

    /// A run configuration is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// A model checkpoint could not be read back.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
