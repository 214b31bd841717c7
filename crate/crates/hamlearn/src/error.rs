//! Error type shared by all modules.

use std::path::PathBuf;

/// Errors produced by construction, simulation and estimation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pauli code {0} out of range (valid codes are 0..=3 for I, X, Y, Z)")]
    InvalidPauliCode(u8),

    #[error("empty pauli string")]
    EmptyPauliString,

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("basis index {index} out of range for {n} qubit(s)")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("qubit index {qubit} out of range for {n} qubit(s)")]
    InvalidQubit { qubit: usize, n: usize },

    #[error("dense operations are capped at {cap} qubits, got {n}")]
    DimensionCap { n: usize, cap: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
