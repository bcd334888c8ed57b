#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Brute-force Kraus evolution `Σ_k K rho K†`.
pub fn evolve(kraus: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    kraus
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k * rho * k.adjoint())
}

/// Pauli vector by dense traces against explicitly built Pauli matrices.
pub fn dense_vectorize(rho: &CMatrix) -> Vec<f64> {
    let n = rho.nrows().trailing_zeros() as usize;
    qikit::pauli_labels(n)
        .map(|l| (qikit::pauli_matrix(&l) * rho).trace().re)
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn completeness(kraus: &[CMatrix]) -> CMatrix {
    let d = kraus[0].nrows();
    kraus
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
}

/// Single-qubit instrument assembled from the published entries of the
/// experimental branch PTMs (top rows, first columns, diagonals); all other
/// entries zero. Mirrors `paper_experimental.json` in the CLI crate.
pub fn experimental_instrument() -> qikit::QuantumInstrument {
    let b0 = [
        0.5117, 0.0018, -0.0026, 0.4940, //
        0.0, 0.01, 0.0, 0.0, //
        -0.01, 0.0, 0.01, 0.0, //
        0.49, 0.0, 0.0, 0.49,
    ];
    let b1 = [
        0.4883, -0.0018, 0.0026, -0.4940, //
        0.0, 0.01, 0.0, 0.0, //
        0.0, 0.0, 0.01, 0.0, //
        -0.41, 0.0, 0.0, 0.43,
    ];
    qikit::QuantumInstrument::new(vec![
        ("0".into(), qikit::Ptm::from_row_major(&b0).unwrap()),
        ("1".into(), qikit::Ptm::from_row_major(&b1).unwrap()),
    ])
    .unwrap()
}
