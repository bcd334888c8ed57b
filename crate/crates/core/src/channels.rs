//! Standard single-qubit Kraus sets and gates.

use crate::error::{QiError, Result};
use crate::linalg::{CMatrix, I, ONE, ZERO};
use crate::ptm::{ptm_from_kraus, Ptm};
use num_complex::Complex64;

fn m2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn pauli_x() -> CMatrix {
    m2(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> CMatrix {
    m2(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> CMatrix {
    m2(ONE, ZERO, ZERO, -ONE)
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    m2(r(h), r(h), r(h), r(-h))
}

pub fn s_gate() -> CMatrix {
    m2(ONE, ZERO, ZERO, I)
}

pub fn rx(theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    m2(r(c), -I * s, -I * s, r(c))
}

pub fn ry(theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    m2(r(c), r(-s), r(s), r(c))
}

pub fn rz(theta: f64) -> CMatrix {
    let half = theta / 2.0;
    m2(Complex64::from_polar(1.0, -half), ZERO, ZERO, Complex64::from_polar(1.0, half))
}

/// CNOT with qubit 0 as control.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

pub fn amplitude_damping_kraus(gamma: f64) -> Vec<CMatrix> {
    vec![
        m2(ONE, ZERO, ZERO, r((1.0 - gamma).sqrt())),
        m2(ZERO, r(gamma.sqrt()), ZERO, ZERO),
    ]
}

/// Phase flip with probability `p`: `rho -> (1-p) rho + p Z rho Z`.
pub fn dephasing_kraus(p: f64) -> Vec<CMatrix> {
    vec![
        CMatrix::identity(2, 2).scale((1.0 - p).sqrt()),
        pauli_z().scale(p.sqrt()),
    ]
}

/// Bit flip with probability `p`.
pub fn bit_flip_kraus(p: f64) -> Vec<CMatrix> {
    vec![CMatrix::identity(2, 2).scale((1.0 - p).sqrt()), pauli_x().scale(p.sqrt())]
}

/// `rho -> (1-p) rho + p I/2`.
pub fn depolarizing_kraus(p: f64) -> Vec<CMatrix> {
    let q = (p / 4.0).sqrt();
    vec![
        CMatrix::identity(2, 2).scale((1.0 - 3.0 * p / 4.0).sqrt()),
        pauli_x().scale(q),
        pauli_y().scale(q),
        pauli_z().scale(q),
    ]
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(QiError::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {value}"
        )));
    }
    Ok(())
}

pub fn amplitude_damping(gamma: f64) -> Result<Ptm> {
    check_rate("damping rate", gamma)?;
    ptm_from_kraus(&amplitude_damping_kraus(gamma))
}

pub fn dephasing(p: f64) -> Result<Ptm> {
    check_rate("dephasing probability", p)?;
    ptm_from_kraus(&dephasing_kraus(p))
}

pub fn bit_flip(p: f64) -> Result<Ptm> {
    check_rate("bit-flip probability", p)?;
    ptm_from_kraus(&bit_flip_kraus(p))
}

pub fn depolarizing(p: f64) -> Result<Ptm> {
    check_rate("depolarizing probability", p)?;
    ptm_from_kraus(&depolarizing_kraus(p))
}

pub fn unitary(u: &CMatrix) -> Result<Ptm> {
    ptm_from_kraus(std::slice::from_ref(u))
}
