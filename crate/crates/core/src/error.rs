use thiserror::Error;

/// Errors raised by state construction and the tangle evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangleError {
    #[error("expected {expected} amplitudes for {n} qubits, got {got}")]
    AmplitudeCount { n: usize, expected: usize, got: usize },

    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("qubit {qubit} out of range 1..={n}")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("bit value {value} at position {position} is not 0 or 1")]
    InvalidBit { position: usize, value: u8 },

    #[error("index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("operation requires an odd qubit count >= 3, got {0}")]
    RequiresOddQubits(usize),

    #[error("operation requires at least {min} qubits, got {got}")]
    TooFewQubits { min: usize, got: usize },

    #[error("operation requires exactly {expected} qubits, got {got}")]
    WrongQubitCount { expected: usize, got: usize },

    #[error("{n} qubits exceeds the oracle cap of {cap}")]
    AboveCap { n: usize, cap: usize },

    #[error("the n-tangle pattern with a single link is only permutation invariant for even n or n = 3, got {0} (use force)")]
    EvenFormOnOddQubits(usize),

    #[error("local operator on qubit {qubit} is not invertible (|det| = {det_abs})")]
    NotInvertible { qubit: usize, det_abs: f64 },

    #[error("local operator on qubit {qubit} is not unitary (deviation {deviation})")]
    NotUnitary { qubit: usize, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not an isometry (deviation {0})")]
    NotIsometric(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TangleError>;
