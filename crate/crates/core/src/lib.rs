//! Quantum instruments as outcome-indexed Pauli transfer matrices.
//!
//! A quantum instrument is an ordered set of completely positive branch maps,
//! one per classical outcome, whose sum preserves trace. This crate represents
//! every branch by its PTM and provides:
//!
//! * [`pauli`] and [`state`]: the n-qubit Pauli basis and Pauli-vector states,
//! * [`ptm`] and [`superop`]: PTM construction, Choi conversion, CP/TP checks
//!   and block readouts,
//! * [`instrument`]: the instrument type, its algebra and the error diagnostics
//!   (confusion matrix, POVM effects, post-measurement states, repeatability),
//! * [`sim`]: exact and sampled simulation of circuits with mid-circuit
//!   measurements and classically conditioned operations.

pub mod channels;
pub mod error;
pub mod instrument;
pub mod linalg;
pub mod pauli;
pub mod ptm;
pub mod random;
pub mod sim;
pub mod state;
pub mod superop;

pub use error::{QiError, Result};
pub use instrument::diagnostics::{
    assignment_fidelity, diagnose, measurement_axis, ConfusionMatrix, DiagnosticReport,
    MeasurementAxis, PovmEffect,
};
pub use instrument::{ideal_projective_instrument, QuantumInstrument, P_FLOOR};
pub use pauli::{pauli_labels, pauli_matrix, PauliLabel};
pub use ptm::{embed, ptm_from_kraus, Ptm};
pub use sim::{Circuit, Condition, Instruction, RunResult, ShotRecord};
pub use state::{devectorize, vectorize, DensityMatrix, PauliVector};
pub use superop::{ChoiMatrix, PtmBlocks};

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QIKIT_MAX_QUBITS";
/// Dense `4^n x 4^n` storage budget.
pub const DEFAULT_MAX_QUBITS: usize = 6;

pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

pub fn check_qubit_count(requested: usize) -> Result<()> {
    let max = max_qubits();
    if requested == 0 {
        return Err(QiError::InvalidParameter("qubit count must be at least 1".into()));
    }
    if requested > max {
        return Err(QiError::TooManyQubits { requested, max });
    }
    Ok(())
}
