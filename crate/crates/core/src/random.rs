//! Random states, unitaries and Kraus-built instruments for testing and
//! benchmarking.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::instrument::QuantumInstrument;
use crate::linalg::CMatrix;
use crate::ptm::ptm_from_kraus;
use crate::state::DensityMatrix;
use num_complex::Complex64;

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A `rows x cols` matrix with orthonormal columns.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rng, rows, cols).qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution is Haar.
    let mut q = q;
    for c in 0..cols {
        let diag = r[(c, c)];
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for row in 0..rows {
                q[(row, c)] *= phase;
            }
        }
    }
    q
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    isometry(rng, dim, dim)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> DensityMatrix {
    let psi = ginibre(rng, 1usize << num_qubits, 1);
    let psi = psi.unscale(psi.norm());
    DensityMatrix::new(&psi * psi.adjoint()).expect("square power-of-two matrix")
}

/// Mixed state `G G† / Tr[G G†]` from a square Ginibre matrix.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize) -> DensityMatrix {
    let d = 1usize << num_qubits;
    let g = ginibre(rng, d, d);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::new(rho.unscale(tr)).expect("square power-of-two matrix")
}

/// `count` Kraus operators with `Σ K†K = I`.
pub fn kraus_channel<R: Rng + ?Sized>(rng: &mut R, num_qubits: usize, count: usize) -> Vec<CMatrix> {
    instrument_kraus(rng, num_qubits, 1, count).remove(0)
}

/// Kraus operators grouped by outcome; the whole collection is complete.
pub fn instrument_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    num_qubits: usize,
    outcomes: usize,
    kraus_per_outcome: usize,
) -> Vec<Vec<CMatrix>> {
    let d = 1usize << num_qubits;
    let total = outcomes * kraus_per_outcome;
    let v = isometry(rng, d * total, d);
    let mut blocks = (0..total).map(|k| v.rows(k * d, d).into_owned());
    (0..outcomes)
        .map(|_| blocks.by_ref().take(kraus_per_outcome).collect())
        .collect()
}

/// Instrument with outcome labels `"0"`, `"1"`, ... built from random Kraus sets.
pub fn instrument<R: Rng + ?Sized>(
    rng: &mut R,
    num_qubits: usize,
    outcomes: usize,
    kraus_per_outcome: usize,
) -> (QuantumInstrument, Vec<Vec<CMatrix>>) {
    let kraus = instrument_kraus(rng, num_qubits, outcomes, kraus_per_outcome);
    let branches = kraus
        .iter()
        .enumerate()
        .map(|(i, ks)| (i.to_string(), ptm_from_kraus(ks).expect("valid Kraus set")))
        .collect();
    let instr = QuantumInstrument::new(branches).expect("distinct labels, equal dimensions");
    (instr, kraus)
}
