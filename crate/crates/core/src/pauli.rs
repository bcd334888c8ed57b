//! The n-qubit Pauli basis.
//!
//! Basis order is IXYZ-lexicographic with the leftmost qubit most
//! significant: for two qubits the order is II, IX, IY, IZ, XI, ... . Qubit 0
//! is the leftmost tensor factor both in Pauli labels and in the
//! computational basis, so `pauli_matrix("XZ") == kron(X, Z)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{QiError, Result};
use crate::linalg::{kron, CMatrix, I, ONE, ZERO};
use num_complex::Complex64;

const ALPHABET: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// A tensor product of single-qubit Paulis, stored as one base-4 digit per
/// qubit (I=0, X=1, Y=2, Z=3).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    digits: Vec<u8>,
}

impl PauliLabel {
    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(QiError::InvalidPauliLabel(text.to_string()));
        }
        let digits = text
            .chars()
            .map(|c| match c {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                _ => Err(QiError::InvalidPauliLabel(text.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { digits })
    }

    /// Label at position `index` of the `num_qubits`-qubit basis.
    pub fn from_index(index: usize, num_qubits: usize) -> Self {
        let digits = (0..num_qubits)
            .map(|q| ((index >> (2 * (num_qubits - 1 - q))) & 3) as u8)
            .collect();
        Self { digits }
    }

    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| (acc << 2) | d as usize)
    }

    pub fn num_qubits(&self) -> usize {
        self.digits.len()
    }

    pub fn is_identity(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    #[cfg(test)]
    pub(crate) fn sparse(&self) -> SparsePauli {
        SparsePauli::from_index(self.index(), self.num_qubits())
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", ALPHABET[d as usize])?;
        }
        Ok(())
    }
}

impl FromStr for PauliLabel {
    type Err = QiError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// All `4^n` labels in basis order.
pub fn pauli_labels(num_qubits: usize) -> impl Iterator<Item = PauliLabel> {
    (0..1usize << (2 * num_qubits)).map(move |i| PauliLabel::from_index(i, num_qubits))
}

/// Dense matrix of a Pauli label.
pub fn pauli_matrix(label: &PauliLabel) -> CMatrix {
    let single = |d: u8| -> CMatrix {
        match d {
            0 => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            1 => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            2 => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            _ => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    };
    label
        .digits
        .iter()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, &d| kron(&acc, &single(d)))
}

/// A Pauli as a phased permutation: `P|c> = phase(c) |c ^ x>`.
///
/// Computational-basis bit `n-1-q` belongs to qubit `q`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SparsePauli {
    pub x: usize,
    pub z: usize,
    ny: u32,
}

impl SparsePauli {
    pub fn from_index(index: usize, num_qubits: usize) -> Self {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for q in 0..num_qubits {
            let digit = (index >> (2 * (num_qubits - 1 - q))) & 3;
            let bit = 1usize << (num_qubits - 1 - q);
            match digit {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        Self { x, z, ny }
    }

    /// Phase picked up by column `c`.
    #[inline]
    pub fn phase(&self, c: usize) -> Complex64 {
        let base = match self.ny % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        if (c & self.z).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    /// `Tr[P M]` in O(d).
    pub fn trace_product(&self, m: &CMatrix) -> Complex64 {
        (0..m.nrows())
            .map(|r| self.phase(r) * m[(r, r ^ self.x)])
            .sum()
    }

    /// `M P` without forming `P`: `(M P)[r][c] = M[r][c ^ x] * phase(c)`.
    pub fn right_multiply(&self, m: &CMatrix) -> CMatrix {
        let d = m.ncols();
        CMatrix::from_fn(m.nrows(), d, |r, c| m[(r, c ^ self.x)] * self.phase(c))
    }
}
