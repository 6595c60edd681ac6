//! Unitary gates over one or two qubits.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Maximum entrywise deviation tolerated when checking U†U = I.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A dense unitary acting on `arity` qubits.
///
/// The matrix is stored row-major with dimension 2^arity. Basis indices
/// follow the same convention as [`crate::statevector::PureState`]: the
/// first target qubit is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    arity: usize,
    matrix: Vec<Complex64>,
}

impl Gate {
    /// Build a gate from an explicit matrix, rejecting non-unitary input.
    pub fn from_matrix(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if arity == 0 || arity > 2 {
            return Err(Error::contract(format!(
                "gate arity must be 1 or 2, got {arity}"
            )));
        }
        let dim = 1usize << arity;
        if matrix.len() != dim * dim {
            return Err(Error::contract(format!(
                "gate matrix must have {} entries, got {}",
                dim * dim,
                matrix.len()
            )));
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::contract("gate matrix has non-finite entries"));
        }
        // U†U = I entrywise.
        for i in 0..dim {
            for j in 0..dim {
                let mut entry = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    entry += matrix[k * dim + i].conj() * matrix[k * dim + j];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                if (entry - expected).norm() > UNITARITY_TOLERANCE {
                    return Err(Error::NonUnitary);
                }
            }
        }
        Ok(Gate { arity, matrix })
    }

    fn new_unchecked(arity: usize, matrix: Vec<Complex64>) -> Self {
        Gate { arity, matrix }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub(crate) fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn identity() -> Self {
        Gate::new_unchecked(1, c_matrix(&[[1.0, 0.0], [0.0, 1.0]]))
    }

    pub fn x() -> Self {
        Gate::new_unchecked(1, c_matrix(&[[0.0, 1.0], [1.0, 0.0]]))
    }

    pub fn y() -> Self {
        let i = Complex64::i();
        Gate::new_unchecked(1, vec![Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)])
    }

    pub fn z() -> Self {
        Gate::new_unchecked(1, c_matrix(&[[1.0, 0.0], [0.0, -1.0]]))
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Gate::new_unchecked(1, c_matrix(&[[h, h], [h, -h]]))
    }

    /// CNOT with the first target as control, second as target.
    pub fn cnot() -> Self {
        Gate::new_unchecked(
            2,
            c_matrix(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 1.0, 0.0],
            ]),
        )
    }

    /// Controlled-Z; symmetric in its two targets.
    pub fn cz() -> Self {
        Gate::new_unchecked(
            2,
            c_matrix(&[
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, -1.0],
            ]),
        )
    }
}

fn c_matrix<const N: usize>(rows: &[[f64; N]]) -> Vec<Complex64> {
    rows.iter()
        .flat_map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)))
        .collect()
}
