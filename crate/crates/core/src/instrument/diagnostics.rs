//! Reading errors off an instrument's branch PTMs.
//!
//! Everything here is a pure function of the instrument. The top row of each
//! branch gives the outcome statistics (and hence the confusion matrix and the
//! POVM effect), the first column gives the post-measurement state of a
//! maximally mixed input, and the rest of the matrix tells how much
//! coherence survives the measurement.

use serde::Serialize;

use super::{QuantumInstrument, P_FLOOR};
use crate::error::{QiError, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::pauli::SparsePauli;
use crate::state::{vectorize, DensityMatrix, PauliVector};
use crate::superop::{is_cp, is_trace_nonincreasing, numerical_rank, pauli_fidelities, tp_residual, DEFAULT_RANK_TOL};

/// `entries[k][b] = p(outcome k | basis state b prepared)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub outcomes: Vec<String>,
    pub basis_states: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn get(&self, outcome: usize, basis: usize) -> f64 {
        self.entries[outcome][basis]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.basis_states.len())
            .map(|b| self.entries.iter().map(|row| row[b]).sum())
            .collect()
    }
}

fn basis_labels(num_qubits: usize) -> Vec<String> {
    (0..1usize << num_qubits)
        .map(|b| format!("{b:0width$b}", width = num_qubits))
        .collect()
}

fn basis_vector(num_qubits: usize, b: usize) -> PauliVector {
    vectorize(&DensityMatrix::basis_state(num_qubits, b)).expect("basis projectors are Hermitian")
}

pub fn confusion_matrix(instr: &QuantumInstrument) -> ConfusionMatrix {
    let n = instr.num_qubits();
    let columns: Vec<Vec<f64>> = (0..1usize << n)
        .map(|b| {
            instr
                .outcome_probabilities(&basis_vector(n, b))
                .expect("basis states are normalized")
        })
        .collect();
    ConfusionMatrix {
        outcomes: instr.labels().map(str::to_string).collect(),
        basis_states: basis_labels(n),
        entries: (0..instr.len())
            .map(|k| columns.iter().map(|col| col[k]).collect())
            .collect(),
    }
}

/// Mean of `p(b | b)` over basis states.
///
/// Outcome `k` is matched to basis state `k`; extra rows or columns do not
/// contribute.
pub fn assignment_fidelity(m: &ConfusionMatrix) -> f64 {
    let count = m.basis_states.len();
    let diag: f64 = (0..count.min(m.outcomes.len())).map(|k| m.entries[k][k]).sum();
    diag / count as f64
}

/// A POVM element `E_i` with `p(i | rho) = Tr[E_i rho]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmEffect {
    pub label: String,
    matrix: CMatrix,
    coefficients: Vec<f64>,
}

impl PovmEffect {
    /// `E = Σ_j c_j P_j`.
    pub fn from_pauli_coefficients(label: impl Into<String>, coefficients: Vec<f64>) -> Result<Self> {
        let v = PauliVector::new(coefficients.clone())?;
        let n = v.num_qubits();
        let d = 1usize << n;
        let mut matrix = CMatrix::zeros(d, d);
        for (j, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let p = SparsePauli::from_index(j, n);
            for col in 0..d {
                matrix[(col ^ p.x, col)] += p.phase(col) * c;
            }
        }
        Ok(Self {
            label: label.into(),
            matrix,
            coefficients,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Coefficients in the Pauli basis, identity first.
    pub fn pauli_coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn num_qubits(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `Tr[E rho]`.
    pub fn probability(&self, rho: &DensityMatrix) -> f64 {
        (&self.matrix * rho.matrix()).trace().re
    }
}

/// One effect per outcome: `E_i = Σ_j Λ^(i)_0j P_j`.
pub fn povm_effects(instr: &QuantumInstrument) -> Vec<PovmEffect> {
    instr
        .outcomes()
        .iter()
        .map(|o| {
            PovmEffect::from_pauli_coefficients(o.label.clone(), o.branch.top_row().iter().copied().collect())
                .expect("PTM rows have 4^n entries")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementAxis {
    /// Unit Bloch vector of the traceless part of the effect.
    pub axis: [f64; 3],
    /// Angle in degrees between `axis` and the nearer of `+Z`, `-Z`.
    pub tilt_degrees: f64,
}

/// Norm below which a traceless part counts as absent.
const AXIS_ZERO_TOL: f64 = 1e-12;

pub fn measurement_axis(effect: &PovmEffect) -> Result<MeasurementAxis> {
    if effect.num_qubits() != 1 {
        return Err(QiError::AxisNotSingleQubit(effect.num_qubits()));
    }
    let c = effect.pauli_coefficients();
    let (x, y, z) = (c[1], c[2], c[3]);
    let norm = (x * x + y * y + z * z).sqrt();
    if norm <= AXIS_ZERO_TOL {
        return Err(QiError::UndefinedAxis);
    }
    let transverse = (x * x + y * y).sqrt();
    Ok(MeasurementAxis {
        axis: [x / norm, y / norm, z / norm],
        tilt_degrees: transverse.atan2(z.abs()).to_degrees(),
    })
}

/// True iff every branch has numerical rank 1 at relative cutoff `tol`.
pub fn is_measure_and_prepare(instr: &QuantumInstrument, tol: f64) -> bool {
    instr
        .outcomes()
        .iter()
        .all(|o| numerical_rank(&o.branch, tol) == 1)
}

/// Probability that two immediate repetitions give the same outcome:
/// `Σ_i (top row of Λ_i) · (Λ_i v)`.
pub fn qnd_repeatability(instr: &QuantumInstrument, v: &PauliVector) -> Result<f64> {
    instr.check_input(v)?;
    instr
        .outcomes()
        .iter()
        .map(|o| Ok(o.branch.top_row().dot(o.branch.apply(v)?.coeffs())))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchDiagnostics {
    pub label: String,
    pub cp_min_eigenvalue: f64,
    pub trace_nonincreasing: bool,
    pub pauli_fidelities: Vec<f64>,
    pub nonunital_col: Vec<f64>,
    pub numerical_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectDiagnostics {
    pub label: String,
    pub pauli_coefficients: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `None` for multi-qubit effects or effects proportional to the identity.
    pub axis: Option<MeasurementAxis>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisRepeatability {
    pub basis_state: String,
    pub repeatability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostMixedState {
    pub label: String,
    pub probability: f64,
    /// `None` when the outcome probability is at or below the floor.
    pub state: Option<PauliVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub num_qubits: usize,
    pub tolerance: f64,
    pub valid: bool,
    pub tp_residual: f64,
    pub branches: Vec<BranchDiagnostics>,
    pub confusion: ConfusionMatrix,
    pub assignment_fidelity: f64,
    pub effects: Vec<EffectDiagnostics>,
    pub measure_and_prepare: bool,
    pub qnd_repeatability: Vec<BasisRepeatability>,
    pub post_mixed_states: Vec<PostMixedState>,
}

/// Runs the full error analysis. `tol` governs the CP, trace and TP checks.
pub fn diagnose(instr: &QuantumInstrument, tol: f64) -> DiagnosticReport {
    let n = instr.num_qubits();
    let branches = instr
        .outcomes()
        .iter()
        .map(|o| BranchDiagnostics {
            label: o.label.clone(),
            cp_min_eigenvalue: is_cp(&o.branch, tol).min_eigenvalue,
            trace_nonincreasing: is_trace_nonincreasing(&o.branch, tol).holds,
            pauli_fidelities: pauli_fidelities(&o.branch).iter().copied().collect(),
            nonunital_col: o.branch.first_column().iter().copied().collect(),
            numerical_rank: numerical_rank(&o.branch, DEFAULT_RANK_TOL),
        })
        .collect();
    let effects = povm_effects(instr)
        .into_iter()
        .map(|e| {
            let ev = e.eigenvalues();
            EffectDiagnostics {
                label: e.label.clone(),
                pauli_coefficients: e.pauli_coefficients().to_vec(),
                min_eigenvalue: ev[0],
                max_eigenvalue: ev[ev.len() - 1],
                axis: measurement_axis(&e).ok(),
            }
        })
        .collect();
    let confusion = confusion_matrix(instr);
    let mixed = PauliVector::maximally_mixed(n);
    let post_mixed_states = instr
        .outcomes()
        .iter()
        .map(|o| {
            let unnormalized = o.branch.apply(&mixed).expect("dimensions match");
            let probability = unnormalized.trace();
            PostMixedState {
                label: o.label.clone(),
                probability,
                state: (probability > P_FLOOR).then(|| unnormalized.scaled(1.0 / probability)),
            }
        })
        .collect();
    let qnd = basis_labels(n)
        .into_iter()
        .enumerate()
        .map(|(b, basis_state)| BasisRepeatability {
            basis_state,
            repeatability: qnd_repeatability(instr, &basis_vector(n, b)).expect("normalized input"),
        })
        .collect();
    DiagnosticReport {
        num_qubits: n,
        tolerance: tol,
        valid: instr.validate(tol).passed,
        tp_residual: tp_residual(&instr.discard()),
        branches,
        assignment_fidelity: assignment_fidelity(&confusion),
        confusion,
        effects,
        measure_and_prepare: is_measure_and_prepare(instr, DEFAULT_RANK_TOL),
        qnd_repeatability: qnd,
        post_mixed_states,
    }
}
