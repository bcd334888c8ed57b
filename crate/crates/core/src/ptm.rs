//! Pauli transfer matrices.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{QiError, Result};
use crate::linalg::{kron_real, log4_exact, CMatrix, RMatrix};
use crate::pauli::SparsePauli;
use crate::state::{PauliVector, HERMITIAN_TOL};

/// A real `4^n x 4^n` matrix acting on Pauli vectors, `Λ_ij = Tr[P_i E(P_j)] / d`.
///
/// Entries are not range-checked here: deliberately unphysical matrices
/// (transpose maps, scaled identities) are legitimate inputs to the checks in
/// [`crate::superop`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ptm {
    #[serde(serialize_with = "serialize_rows")]
    matrix: RMatrix,
    #[serde(skip)]
    num_qubits: usize,
}

fn serialize_rows<S: serde::Serializer>(m: &RMatrix, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()))
}

impl Ptm {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QiError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let num_qubits = log4_exact(matrix.nrows())
            .filter(|&n| n >= 1)
            .ok_or(QiError::NotPowerOfFour(matrix.nrows()))?;
        Ok(Self { matrix, num_qubits })
    }

    /// From row-major entries; `entries.len()` must be `16^n`.
    pub fn from_row_major(entries: &[f64]) -> Result<Self> {
        let side = (entries.len() as f64).sqrt().round() as usize;
        if side * side != entries.len() {
            return Err(QiError::NotPowerOfFour(entries.len()));
        }
        Self::new(RMatrix::from_row_slice(side, side, entries))
    }

    pub fn identity(num_qubits: usize) -> Self {
        let side = 1usize << (2 * num_qubits);
        Self {
            matrix: RMatrix::identity(side, side),
            num_qubits,
        }
    }

    pub fn zeros(num_qubits: usize) -> Self {
        let side = 1usize << (2 * num_qubits);
        Self {
            matrix: RMatrix::zeros(side, side),
            num_qubits,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Side length `d^2`.
    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.matrix.transpose().iter().copied().collect()
    }

    /// First row; for a branch map this is the outcome's POVM effect in Pauli form.
    pub fn top_row(&self) -> DVector<f64> {
        self.matrix.row(0).transpose()
    }

    pub fn first_column(&self) -> DVector<f64> {
        self.matrix.column(0).into_owned()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
            num_qubits: self.num_qubits,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            num_qubits: self.num_qubits,
        })
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff_real(&self.matrix, &other.matrix)
    }

    /// Tensor product of channels; `self` acts on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: kron_real(&self.matrix, &other.matrix),
            num_qubits: self.num_qubits + other.num_qubits,
        }
    }

    /// `v' = Λ v`.
    pub fn apply(&self, v: &PauliVector) -> Result<PauliVector> {
        if v.len() != self.side() {
            return Err(QiError::DimensionMismatch {
                expected: self.side(),
                found: v.len(),
            });
        }
        Ok(PauliVector::from_dvector_unchecked(&self.matrix * v.coeffs()))
    }

    /// Matrix product `self · first`: run `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        self.check_same(first)?;
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
            num_qubits: self.num_qubits,
        })
    }

    /// Apply this map to `targets` of a larger register without building the
    /// embedded matrix. Equivalent to `embed(self, targets, n).apply(v)`.
    pub fn apply_on(&self, targets: &[usize], v: &PauliVector) -> Result<PauliVector> {
        let total = v.num_qubits();
        check_targets(targets, self.num_qubits, total)?;
        if targets.len() == total && targets.iter().enumerate().all(|(i, &t)| i == t) {
            return self.apply(v);
        }
        let layout = TargetLayout::new(targets, total);
        let local = self.side();
        let coeffs = v.coeffs();
        let mut out = DVector::zeros(v.len());
        let mut gathered = DVector::zeros(local);
        for rest in 0..layout.rest_count() {
            let base = layout.rest_offset(rest);
            for b in 0..local {
                gathered[b] = coeffs[base | layout.target_offset(b)];
            }
            let mapped = &self.matrix * &gathered;
            for a in 0..local {
                out[base | layout.target_offset(a)] = mapped[a];
            }
        }
        Ok(PauliVector::from_dvector_unchecked(out))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.side() != other.side() {
            return Err(QiError::DimensionMismatch {
                expected: self.side(),
                found: other.side(),
            });
        }
        Ok(())
    }
}

/// `Λ_ij = (1/d) Tr[P_i Σ_k K_k P_j K_k†]`.
pub fn ptm_from_kraus(kraus: &[CMatrix]) -> Result<Ptm> {
    let first = kraus.first().ok_or_else(|| {
        QiError::InvalidParameter("at least one Kraus operator is required".into())
    })?;
    let d = first.nrows();
    for k in kraus {
        if k.nrows() != k.ncols() {
            return Err(QiError::NotSquare {
                rows: k.nrows(),
                cols: k.ncols(),
            });
        }
        if k.nrows() != d {
            return Err(QiError::DimensionMismatch {
                expected: d,
                found: k.nrows(),
            });
        }
    }
    let n = crate::linalg::log2_exact(d)
        .filter(|&n| n >= 1)
        .ok_or(QiError::NotPowerOfTwo(d))?;
    let side = d * d;
    let paulis: Vec<SparsePauli> = (0..side).map(|i| SparsePauli::from_index(i, n)).collect();
    let adjoints: Vec<CMatrix> = kraus.iter().map(|k| k.adjoint()).collect();
    let mut matrix = RMatrix::zeros(side, side);
    for (j, pj) in paulis.iter().enumerate() {
        let mut image = CMatrix::zeros(d, d);
        for (k, k_dag) in kraus.iter().zip(&adjoints) {
            image += pj.right_multiply(k) * k_dag;
        }
        for (i, pi) in paulis.iter().enumerate() {
            let value = pi.trace_product(&image) / d as f64;
            if value.im.abs() > HERMITIAN_TOL {
                return Err(QiError::ImaginaryResidue(value.im.abs()));
            }
            matrix[(i, j)] = value.re;
        }
    }
    Ptm::new(matrix)
}

/// Lift `ptm` to `total` qubits, acting on `targets` (in order) and as the
/// identity elsewhere.
pub fn embed(ptm: &Ptm, targets: &[usize], total: usize) -> Result<Ptm> {
    check_targets(targets, ptm.num_qubits(), total)?;
    let layout = TargetLayout::new(targets, total);
    let side = 1usize << (2 * total);
    let local = ptm.side();
    let mut matrix = RMatrix::zeros(side, side);
    for rest in 0..layout.rest_count() {
        let base = layout.rest_offset(rest);
        for a in 0..local {
            let row = base | layout.target_offset(a);
            for b in 0..local {
                matrix[(row, base | layout.target_offset(b))] = ptm.matrix[(a, b)];
            }
        }
    }
    Ptm::new(matrix)
}

pub(crate) fn check_targets(targets: &[usize], expected: usize, total: usize) -> Result<()> {
    if targets.len() != expected {
        return Err(QiError::InvalidTargets(format!(
            "map acts on {expected} qubit(s) but {} target(s) given",
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= total {
            return Err(QiError::InvalidTargets(format!(
                "target {t} out of range for {total} qubit(s)"
            )));
        }
        if targets[..i].contains(&t) {
            return Err(QiError::InvalidTargets(format!("duplicate target {t}")));
        }
    }
    Ok(())
}

/// Maps local (target) and rest Pauli indices into full-register indices.
struct TargetLayout {
    target_shifts: Vec<usize>,
    rest_shifts: Vec<usize>,
}

impl TargetLayout {
    fn new(targets: &[usize], total: usize) -> Self {
        let shift = |q: usize| 2 * (total - 1 - q);
        let target_shifts = targets.iter().map(|&q| shift(q)).collect();
        let rest_shifts = (0..total)
            .filter(|q| !targets.contains(q))
            .map(shift)
            .collect();
        Self {
            target_shifts,
            rest_shifts,
        }
    }

    fn rest_count(&self) -> usize {
        1usize << (2 * self.rest_shifts.len())
    }

    fn scatter(shifts: &[usize], index: usize) -> usize {
        let k = shifts.len();
        shifts
            .iter()
            .enumerate()
            .fold(0, |acc, (m, &s)| acc | (((index >> (2 * (k - 1 - m))) & 3) << s))
    }

    fn target_offset(&self, local: usize) -> usize {
        Self::scatter(&self.target_shifts, local)
    }

    fn rest_offset(&self, rest: usize) -> usize {
        Self::scatter(&self.rest_shifts, rest)
    }
}
