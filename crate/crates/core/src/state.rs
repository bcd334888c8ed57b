//! Density matrices and their Pauli-vector form.
//!
//! Components follow `v_P = Tr[P rho]`, so a normalized state has `v_I = 1`
//! and the single-qubit ground state is `(1, 0, 0, 1)`. `devectorize` carries
//! the `1/d` factor.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{QiError, Result};
use crate::linalg::{hermiticity_residual, log2_exact, log4_exact, CMatrix};
use crate::pauli::SparsePauli;
use num_complex::Complex64;

/// Tolerance on Hermiticity of inputs and on imaginary residue of derived reals.
pub const HERMITIAN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    num_qubits: usize,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QiError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let num_qubits = log2_exact(matrix.nrows())
            .filter(|&n| n >= 1)
            .ok_or(QiError::NotPowerOfTwo(matrix.nrows()))?;
        Ok(Self { matrix, num_qubits })
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        Self::new(&v * v.adjoint())
    }

    /// Computational basis projector `|b><b|`.
    pub fn basis_state(num_qubits: usize, b: usize) -> Self {
        let d = 1usize << num_qubits;
        let mut m = CMatrix::zeros(d, d);
        m[(b, b)] = Complex64::new(1.0, 0.0);
        Self { matrix: m, num_qubits }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
            num_qubits,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_hermitian_eigenvalue(&self.matrix)
    }
}

/// Real coefficients of a Hermitian operator in the Pauli basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PauliVector {
    #[serde(serialize_with = "serialize_dvector")]
    coeffs: DVector<f64>,
}

fn serialize_dvector<S: serde::Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

impl PauliVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(coeffs))
    }

    pub fn from_dvector(coeffs: DVector<f64>) -> Result<Self> {
        match log4_exact(coeffs.len()) {
            Some(n) if n >= 1 => Ok(Self { coeffs }),
            _ => Err(QiError::NotPowerOfFour(coeffs.len())),
        }
    }

    pub(crate) fn from_dvector_unchecked(coeffs: DVector<f64>) -> Self {
        Self { coeffs }
    }

    pub fn num_qubits(&self) -> usize {
        log4_exact(self.coeffs.len()).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The identity component, i.e. the trace of the operator.
    pub fn trace(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coeffs.as_slice()
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coeffs.iter().copied().collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { coeffs: self.coeffs.scale(factor) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let mut coeffs = DVector::zeros(1usize << (2 * num_qubits));
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    /// Tensor product; `self` is the leftmost factor.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            coeffs: self.coeffs.kronecker(&other.coeffs),
        }
    }
}

impl std::ops::Index<usize> for PauliVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coeffs[i]
    }
}

/// `v_P = Tr[P rho]` for every `P` in basis order.
pub fn vectorize(rho: &DensityMatrix) -> Result<PauliVector> {
    let residual = hermiticity_residual(rho.matrix());
    if residual > HERMITIAN_TOL {
        return Err(QiError::NotHermitian(residual));
    }
    let n = rho.num_qubits();
    let mut coeffs = DVector::zeros(1usize << (2 * n));
    for (i, c) in coeffs.iter_mut().enumerate() {
        let value = SparsePauli::from_index(i, n).trace_product(rho.matrix());
        if value.im.abs() > HERMITIAN_TOL {
            return Err(QiError::ImaginaryResidue(value.im.abs()));
        }
        *c = value.re;
    }
    Ok(PauliVector { coeffs })
}

/// `rho = (1/d) sum_P v_P P`.
pub fn devectorize(v: &PauliVector) -> Result<DensityMatrix> {
    let n = log4_exact(v.len())
        .filter(|&n| n >= 1)
        .ok_or(QiError::NotPowerOfFour(v.len()))?;
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for (i, &coeff) in v.coeffs.iter().enumerate() {
        if coeff == 0.0 {
            continue;
        }
        let p = SparsePauli::from_index(i, n);
        for c in 0..d {
            m[(c ^ p.x, c)] += p.phase(c) * coeff;
        }
    }
    DensityMatrix::new(m.unscale(d as f64))
}
