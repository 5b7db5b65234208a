use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pauli string lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("majorana label {label} is outside a layout of {chains} chains of length {chain_length}")]
    LabelOutOfRange {
        label: String,
        chains: usize,
        chain_length: usize,
    },

    #[error("a braid needs two distinct majorana modes, got {0} twice")]
    IdenticalLabels(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("operator {0} is not hermitian")]
    NonHermitian(String),

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("unsupported braid: {0}")]
    UnsupportedBraid(String),

    #[error("invalid angle {0}")]
    InvalidAngle(f64),

    #[error("postselection retained no weight")]
    EmptyRetained,

    #[error("noise parameters do not cover {0}")]
    UnknownNoiseTarget(String),

    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),

    #[error("shot count must be positive")]
    InvalidShots,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
