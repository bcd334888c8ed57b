use thiserror::Error;

pub type Result<T, E = QiError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QiError {
    #[error("invalid Pauli label {0:?}: expected a non-empty string over I, X, Y, Z")]
    InvalidPauliLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length {0} is not a power of four")]
    NotPowerOfFour(usize),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("imaginary residue {0:.3e} in a quantity that must be real")]
    ImaginaryResidue(f64),

    #[error("invalid target list: {0}")]
    InvalidTargets(String),

    #[error("instrument has no outcomes")]
    EmptyInstrument,

    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown outcome label {0:?}")]
    UnknownOutcome(String),

    #[error("outcome {label:?} has probability {probability:.3e}, conditional state undefined")]
    ZeroProbability { label: String, probability: f64 },

    #[error("effect has no traceless part, measurement axis undefined")]
    UndefinedAxis,

    #[error("measurement axis is only defined for single-qubit effects (got {0} qubits)")]
    AxisNotSingleQubit(usize),

    #[error("{what} is not trace preserving (top-row residual {residual:.3e})")]
    NotTracePreserving { what: String, residual: f64 },

    #[error("instrument failed validation: {0}")]
    InvalidInstrument(String),

    #[error("{requested} qubits exceeds the configured maximum of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("register {0:?} is written more than once")]
    RegisterCollision(String),

    #[error("unknown register {0:?}")]
    UnknownRegister(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
