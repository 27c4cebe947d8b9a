use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("basis index {index} out of range for a {num_qubits}-qubit register")]
    BasisOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} appears more than once among targets and controls")]
    OverlappingQubits(usize),

    #[error("register size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("a {dim}x{dim} matrix cannot act on {targets} target qubit(s)")]
    MatrixArity { dim: usize, targets: usize },

    #[error("unsupported number of target qubits: {0}")]
    UnsupportedArity(usize),

    #[error("parameter vector has {got} entries, circuit expects {expected}")]
    ParamCount { expected: usize, got: usize },

    #[error("gate refers to parameter {index} but the table only has {num_params}")]
    ParamRef { index: usize, num_params: usize },

    #[error("gate expects {expected} parameter reference(s), got {got}")]
    GateArity { expected: usize, got: usize },

    #[error("gate has no parameter {0} to differentiate")]
    NoParameter(usize),

    #[error("non-invertible gate at index {gate}")]
    NonInvertible { gate: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("observable is not Hermitian; use non_hermitian_gradient")]
    NotHermitian,

    #[error("invalid observable: {0}")]
    Observable(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("gate cannot be written in the circuit text format: {0}")]
    Unserializable(String),

    #[error("{0}")]
    Domain(String),
}

impl Error {
    /// Attaches a gate index to errors raised while inverting a bound matrix.
    pub(crate) fn at_gate(self, gate: usize) -> Self {
        match self {
            Error::Singular | Error::NonInvertible { .. } => Error::NonInvertible { gate },
            other => other,
        }
    }
}
