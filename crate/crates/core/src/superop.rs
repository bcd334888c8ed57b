//! Channel-level checks and metrics on PTMs: Choi conversion, CP/TP tests,
//! block extraction and fidelities.
//!
//! Choi convention: `C = (1/d^2) Σ_ij Λ_ij P_i ⊗ conj(P_j)`, output factor
//! first. With this normalization the identity channel maps to the projector
//! onto `|Φ> = Σ_a |aa> / sqrt(d)` and `Tr C = Λ_00`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{QiError, Result};
use crate::linalg::{hermiticity_residual, log4_exact, min_hermitian_eigenvalue, singular_values, CMatrix, RMatrix};
use crate::pauli::SparsePauli;
use crate::ptm::Ptm;
use crate::state::HERMITIAN_TOL;

/// Default tolerance on the smallest Choi eigenvalue.
pub const DEFAULT_CP_TOL: f64 = 1e-8;
/// Relative singular-value cutoff used to count rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    matrix: CMatrix,
    num_qubits: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QiError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let num_qubits = log4_exact(matrix.nrows())
            .filter(|&n| n >= 1)
            .ok_or(QiError::NotPowerOfFour(matrix.nrows()))?;
        let residual = hermiticity_residual(&matrix);
        if residual > HERMITIAN_TOL {
            return Err(QiError::NotHermitian(residual));
        }
        Ok(Self { matrix, num_qubits })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Trace over the output factor.
    pub fn input_marginal(&self) -> CMatrix {
        let d = 1usize << self.num_qubits;
        CMatrix::from_fn(d, d, |r, c| {
            (0..d).map(|a| self.matrix[(a * d + r, a * d + c)]).sum()
        })
    }
}

pub fn ptm_to_choi(ptm: &Ptm) -> ChoiMatrix {
    let n = ptm.num_qubits();
    let d = ptm.dim();
    let side = d * d;
    let paulis: Vec<SparsePauli> = (0..side).map(|i| SparsePauli::from_index(i, n)).collect();
    let mut m = CMatrix::zeros(side, side);
    let scale = 1.0 / side as f64;
    for (i, pi) in paulis.iter().enumerate() {
        for (j, pj) in paulis.iter().enumerate() {
            let coeff = ptm.get(i, j);
            if coeff == 0.0 {
                continue;
            }
            for c1 in 0..d {
                let left = pi.phase(c1) * coeff * scale;
                let r1 = c1 ^ pi.x;
                for c2 in 0..d {
                    let r2 = c2 ^ pj.x;
                    m[(r1 * d + r2, c1 * d + c2)] += left * pj.phase(c2).conj();
                }
            }
        }
    }
    ChoiMatrix { matrix: m, num_qubits: n }
}

pub fn choi_to_ptm(choi: &ChoiMatrix) -> Result<Ptm> {
    let n = choi.num_qubits();
    let d = 1usize << n;
    let side = d * d;
    let paulis: Vec<SparsePauli> = (0..side).map(|i| SparsePauli::from_index(i, n)).collect();
    let c = choi.matrix();
    let mut out = RMatrix::zeros(side, side);
    for (i, pi) in paulis.iter().enumerate() {
        for (j, pj) in paulis.iter().enumerate() {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for r1 in 0..d {
                let left = pi.phase(r1);
                for r2 in 0..d {
                    acc += c[(r1 * d + r2, (r1 ^ pi.x) * d + (r2 ^ pj.x))]
                        * left
                        * pj.phase(r2).conj();
                }
            }
            if acc.im.abs() > HERMITIAN_TOL {
                return Err(QiError::ImaginaryResidue(acc.im.abs()));
            }
            out[(i, j)] = acc.re;
        }
    }
    Ptm::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CpCheck {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
}

/// CP iff the smallest Choi eigenvalue is at least `-tol`.
pub fn is_cp(ptm: &Ptm, tol: f64) -> CpCheck {
    let min_eigenvalue = ptm_to_choi(ptm).min_eigenvalue();
    CpCheck {
        is_cp: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TpCheck {
    pub is_tp: bool,
    pub residual: f64,
}

pub fn tp_residual(ptm: &Ptm) -> f64 {
    ptm.top_row()
        .iter()
        .enumerate()
        .map(|(j, &x)| (x - if j == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

pub fn is_tp(ptm: &Ptm, tol: f64) -> TpCheck {
    let residual = tp_residual(ptm);
    TpCheck {
        is_tp: residual <= tol,
        residual,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceCheck {
    pub holds: bool,
    /// Smallest eigenvalue of `I - d · Tr_out(C)`; negative when some input
    /// gains trace.
    pub min_eigenvalue: f64,
}

/// Whether `Tr[E(rho)] <= Tr[rho]` for every state, tested as positivity of
/// `I - d · Tr_out(C)`.
pub fn is_trace_nonincreasing(ptm: &Ptm, tol: f64) -> TraceCheck {
    let choi = ptm_to_choi(ptm);
    let d = ptm.dim();
    let slack = CMatrix::identity(d, d) - choi.input_marginal().scale(d as f64);
    let min_eigenvalue = min_hermitian_eigenvalue(&slack);
    TraceCheck {
        holds: min_eigenvalue >= -tol,
        min_eigenvalue,
    }
}

pub fn unital_residual(ptm: &Ptm) -> f64 {
    ptm.first_column()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - if i == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

pub fn is_unital(ptm: &Ptm, tol: f64) -> bool {
    unital_residual(ptm) <= tol
}

/// The four regions of a PTM read during error analysis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PtmBlocks {
    pub tp_row: Vec<f64>,
    pub nonunital_col: Vec<f64>,
    pub unital_block: Vec<Vec<f64>>,
    pub diagonal: Vec<f64>,
}

pub fn blocks(ptm: &Ptm) -> PtmBlocks {
    let m = ptm.matrix();
    let side = ptm.side();
    PtmBlocks {
        tp_row: ptm.top_row().iter().copied().collect(),
        nonunital_col: ptm.first_column().iter().copied().collect(),
        unital_block: (1..side)
            .map(|r| (1..side).map(|c| m[(r, c)]).collect())
            .collect(),
        diagonal: m.diagonal().iter().copied().collect(),
    }
}

impl PtmBlocks {
    pub fn reassemble(&self) -> Result<Ptm> {
        let side = self.tp_row.len();
        if self.nonunital_col.len() != side
            || self.unital_block.len() + 1 != side
            || self.unital_block.iter().any(|row| row.len() + 1 != side)
        {
            return Err(QiError::DimensionMismatch {
                expected: side,
                found: self.nonunital_col.len(),
            });
        }
        let m = RMatrix::from_fn(side, side, |r, c| match (r, c) {
            (0, _) => self.tp_row[c],
            (_, 0) => self.nonunital_col[r],
            _ => self.unital_block[r - 1][c - 1],
        });
        Ptm::new(m)
    }
}

/// Diagonal of the PTM.
pub fn pauli_fidelities(ptm: &Ptm) -> DVector<f64> {
    ptm.matrix().diagonal()
}

/// Number of singular values above `tol` times the largest.
pub fn numerical_rank(ptm: &Ptm, tol: f64) -> usize {
    let sv = singular_values(ptm.matrix());
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// `Tr[targetᵀ Λ] / d^2`.
pub fn entanglement_fidelity(ptm: &Ptm, target: &Ptm) -> Result<f64> {
    if ptm.side() != target.side() {
        return Err(QiError::DimensionMismatch {
            expected: target.side(),
            found: ptm.side(),
        });
    }
    let overlap: f64 = ptm
        .matrix()
        .iter()
        .zip(target.matrix().iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(overlap / ptm.side() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels;
    use crate::linalg::{max_abs_diff, ONE, ZERO};
    use crate::ptm::ptm_from_kraus;

    fn measure0() -> Ptm {
        ptm_from_kraus(&[CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])]).unwrap()
    }

    fn measure1() -> Ptm {
        ptm_from_kraus(&[CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE])]).unwrap()
    }

    fn transpose_map() -> Ptm {
        Ptm::new(RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, 1.0]))).unwrap()
    }

    #[test]
    fn identity_choi_is_bell_projector() {
        let choi = ptm_to_choi(&Ptm::identity(1));
        let h = 0.5;
        let mut bell = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(r, c)] = ONE.scale(h);
        }
        assert!(max_abs_diff(choi.matrix(), &bell) < 1e-15);
        assert_eq!(choi_to_ptm(&choi).unwrap(), Ptm::identity(1));
    }

    #[test]
    fn projector_branch_choi_is_rank_one() {
        let ev = ptm_to_choi(&measure0()).eigenvalues();
        assert!(ev[..3].iter().all(|e| e.abs() < 1e-12));
        assert!((ev[3] - 0.5).abs() < 1e-12);
        assert_eq!(choi_to_ptm(&ptm_to_choi(&measure0())).unwrap(), measure0());
    }

    #[test]
    fn inflated_xx_is_not_cp() {
        let mut m = RMatrix::identity(4, 4);
        m[(1, 1)] = 1.5;
        let check = is_cp(&Ptm::new(m).unwrap(), DEFAULT_CP_TOL);
        assert!(!check.is_cp);
        assert!(check.min_eigenvalue < -0.01);
    }

    #[test]
    fn cp_decisions() {
        let id = is_cp(&Ptm::identity(1), DEFAULT_CP_TOL);
        assert!(id.is_cp && id.min_eigenvalue >= -1e-15);
        assert!(is_cp(&measure0(), DEFAULT_CP_TOL).is_cp);
        let t = is_cp(&transpose_map(), DEFAULT_CP_TOL);
        assert!(!t.is_cp);
        assert!((t.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn tp_decisions() {
        assert!(is_tp(&Ptm::identity(1), 1e-10).is_tp);
        let m0 = is_tp(&measure0(), 1e-10);
        assert!(!m0.is_tp);
        assert!((m0.residual - 0.5).abs() < 1e-15);
        assert!(is_tp(&measure0().add(&measure1()).unwrap(), 1e-10).is_tp);
    }

    #[test]
    fn trace_nonincreasing_decisions() {
        assert!(is_trace_nonincreasing(&measure0(), 1e-10).holds);
        assert!(is_trace_nonincreasing(&measure1(), 1e-10).holds);
        let inflated = is_trace_nonincreasing(&Ptm::identity(1).scaled(1.5), 1e-10);
        assert!(!inflated.holds);
        assert!((inflated.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn unitality() {
        assert!(is_unital(&channels::dephasing(0.3).unwrap(), 1e-12));
        let damp = channels::amplitude_damping(0.1).unwrap();
        assert!(!is_unital(&damp, 1e-12));
        assert!((damp.get(3, 0) - 0.1).abs() < 1e-12);
        assert!(!is_unital(&measure0(), 1e-12));
        assert_eq!(measure0().first_column().as_slice(), [0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn identity_blocks_and_reassembly() {
        let b = blocks(&Ptm::identity(1));
        assert_eq!(b.tp_row, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.nonunital_col, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(b.diagonal, [1.0; 4]);
        assert_eq!(b.unital_block, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let damp = channels::amplitude_damping(0.37).unwrap();
        assert_eq!(blocks(&damp).reassemble().unwrap(), damp);
    }

    #[test]
    fn fidelities_and_rank() {
        let full_dephase = ptm_from_kraus(&[
            CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]),
            CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]),
        ])
        .unwrap();
        assert_eq!(pauli_fidelities(&full_dephase).as_slice(), [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(pauli_fidelities(&Ptm::identity(1)).as_slice(), [1.0; 4]);
        assert_eq!(numerical_rank(&measure0(), DEFAULT_RANK_TOL), 1);
        assert_eq!(numerical_rank(&Ptm::identity(1), DEFAULT_RANK_TOL), 4);
        assert_eq!(numerical_rank(&Ptm::zeros(1), DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn entanglement_fidelity_examples() {
        let id = Ptm::identity(1);
        assert_eq!(entanglement_fidelity(&id, &id).unwrap(), 1.0);
        let p = 0.12;
        let f = entanglement_fidelity(&channels::depolarizing(p).unwrap(), &id).unwrap();
        assert!((f - (1.0 - 0.75 * p)).abs() < 1e-12);
        let u = channels::unitary(&(channels::rx(0.4) * channels::rz(1.3))).unwrap();
        assert!((entanglement_fidelity(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert!(entanglement_fidelity(&id, &Ptm::identity(2)).is_err());
    }

    #[test]
    fn choi_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 1)] = ONE;
        assert!(matches!(ChoiMatrix::new(m), Err(QiError::NotHermitian(_))));
    }
}
