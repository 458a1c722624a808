use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix data has {found} entries, expected {expected}")]
    BadDataLength { expected: usize, found: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("qubit index {0} used twice")]
    RepeatedQubit(usize),
    #[error("amplitudes not normalized: sum of squared moduli is {0}")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("Kraus operators are not complete (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("expected {expected} parameters, found {found}")]
    ParamLength { expected: usize, found: usize },
    #[error("parameter index {index} out of range ({count} parameters)")]
    ParamIndex { index: usize, count: usize },
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("at least {min} trials required, found {found}")]
    TooFewTrials { min: usize, found: usize },
    #[error("{what} limited to {limit}, requested {found}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        found: usize,
    },
    #[error("invalid Pauli word: {0}")]
    InvalidPauli(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("value {value} outside the spectrum [{min}, {max}] at iteration {iteration}")]
    OutsideSpectrum {
        iteration: usize,
        value: f64,
        min: f64,
        max: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
