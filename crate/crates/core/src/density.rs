//! Dense density matrices for small qubit subsets.

use alloc::vec::Vec;
use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::LocalPauli;

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity and unit trace.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Eigenvalues this close to zero are treated as zero.
pub const EIGEN_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DensityError {
    #[error("matrix is {rows}x{cols}; expected {expected}x{expected} for {qubits} qubits")]
    Dimension { rows: usize, cols: usize, expected: usize, qubits: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    Trace(f64),
}

/// Hermitian, unit-trace matrix over `2^k` basis states, labeled by the
/// device qubits it describes. Label 0 is the most significant index bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(qubits: Vec<usize>, matrix: CMatrix) -> Result<Self, DensityError> {
        let expected = 1usize << qubits.len();
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(DensityError::Dimension {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected,
                qubits: qubits.len(),
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > STRUCTURE_TOL {
            return Err(DensityError::NotHermitian(deviation));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STRUCTURE_TOL || trace.im.abs() > STRUCTURE_TOL {
            return Err(DensityError::Trace(trace.re));
        }
        Ok(DensityMatrix { qubits, matrix })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// True if no eigenvalue is below `-EIGEN_ZERO_TOL`.
    pub fn is_positive_semidefinite(&self) -> bool {
        self.eigenvalues().first().is_none_or(|&l| l >= -EIGEN_ZERO_TOL)
    }

    /// `Tr(ρ P)`.
    pub fn expectation(&self, pauli: &LocalPauli) -> f64 {
        expectation(&self.matrix, pauli)
    }
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and the
/// matching eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(values) V†`, symmetrized to be exactly Hermitian.
pub fn compose_hermitian(vectors: &CMatrix, values: &[f64]) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (c, &lambda) in values.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let v = vectors.column(c);
        for i in 0..n {
            let vi = v[i] * lambda;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    let adjoint = out.adjoint();
    (out + adjoint).scale(0.5)
}

/// Entry of `P` at `(j ^ x, j)`: `±i^{#Y} (-1)^{popcount(j & z)}`.
pub(crate) fn pauli_phase(pauli: &LocalPauli, column: usize) -> Complex64 {
    let mut phase = match pauli.y_count() % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    if (column as u32 & pauli.z_mask()).count_ones() % 2 == 1 {
        phase = -phase;
    }
    if pauli.is_negative() {
        phase = -phase;
    }
    phase
}

/// Dense matrix of a Pauli string.
pub fn pauli_matrix(pauli: &LocalPauli) -> CMatrix {
    let dim = 1usize << pauli.len();
    let x = pauli.x_mask() as usize;
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        m[(j ^ x, j)] = pauli_phase(pauli, j);
    }
    m
}

/// `Tr(m P)` for a Hermitian `m`.
pub fn expectation(m: &CMatrix, pauli: &LocalPauli) -> f64 {
    let x = pauli.x_mask() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m.nrows() {
        acc += m[(j, j ^ x)] * pauli_phase(pauli, j);
    }
    acc.re
}

/// Kronecker product with `a` as the more significant factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}
