//! Local state tomography: all `3^k` Pauli-basis settings, Pauli
//! expectations, linear inversion and projection onto physical states.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::counts::{Basis, BasisSetting, CountsTable};
use crate::density::{
    compose_hermitian, hermitian_deviation, hermitian_eigen, pauli_phase, CMatrix, DensityError, DensityMatrix,
};
use crate::pauli::{LocalPauli, Pauli};
use crate::qrem::project_to_simplex;

pub const MAX_TOMOGRAPHY_QUBITS: usize = 5;
/// Input tolerance for Hermiticity and trace in
/// [`nearest_physical_density_matrix`].
pub const INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TomographyError {
    #[error("tomography needs 1 to {MAX_TOMOGRAPHY_QUBITS} qubits, got {0}")]
    Size(usize),
    #[error("dataset has {got} settings, expected {expected}")]
    SettingCount { got: usize, expected: usize },
    #[error("setting {0} is missing")]
    MissingSetting(String),
    #[error("setting {0} appears more than once")]
    DuplicateSetting(String),
    #[error("table for setting {0} measures a different qubit list")]
    QubitMismatch(String),
    #[error("table for setting {setting} has {shots} shots, expected {expected}")]
    ShotMismatch { setting: String, shots: u64, expected: u64 },
    #[error("probability vectors do not match {0} qubits")]
    ProbabilityShape(usize),
    #[error(transparent)]
    Density(#[from] DensityError),
}

fn check_size(k: usize) -> Result<(), TomographyError> {
    if (1..=MAX_TOMOGRAPHY_QUBITS).contains(&k) {
        Ok(())
    } else {
        Err(TomographyError::Size(k))
    }
}

/// All `3^k` settings in lexicographic order (X < Y < Z).
pub fn tomography_settings(k: usize) -> Result<Vec<BasisSetting>, TomographyError> {
    check_size(k)?;
    Ok((0..3usize.pow(k as u32)).map(|i| BasisSetting::from_index(k, i)).collect())
}

/// One counts table per setting, stored in setting order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TomographyDataset {
    qubits: Vec<usize>,
    shots: u64,
    tables: Vec<CountsTable>,
}

impl TomographyDataset {
    pub fn new(qubits: Vec<usize>, tables: Vec<CountsTable>) -> Result<Self, TomographyError> {
        let k = qubits.len();
        check_size(k)?;
        let expected = 3usize.pow(k as u32);
        let mut slots: Vec<Option<CountsTable>> = vec![None; expected];
        let shots = tables.first().map_or(0, CountsTable::shots);
        for t in tables {
            let name = alloc::format!("{}", t.setting());
            if t.qubits() != qubits.as_slice() {
                return Err(TomographyError::QubitMismatch(name));
            }
            if t.shots() != shots {
                return Err(TomographyError::ShotMismatch { setting: name, shots: t.shots(), expected: shots });
            }
            let slot = &mut slots[t.setting().index()];
            if slot.is_some() {
                return Err(TomographyError::DuplicateSetting(name));
            }
            *slot = Some(t);
        }
        let tables = slots
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| TomographyError::MissingSetting(alloc::format!("{}", BasisSetting::from_index(k, i))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TomographyDataset { qubits, shots, tables })
    }

    /// Ordered qubits: the pair first, then its neighbors.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Shots per setting.
    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Tables in setting order.
    pub fn tables(&self) -> &[CountsTable] {
        &self.tables
    }

    pub fn table(&self, setting: &BasisSetting) -> Option<&CountsTable> {
        (setting.len() == self.qubits.len()).then(|| &self.tables[setting.index()])
    }

    /// Empirical outcome frequencies per setting.
    pub fn probabilities(&self) -> Vec<Vec<f64>> {
        self.tables.iter().map(CountsTable::frequencies).collect()
    }
}

/// All `4^k` Pauli expectations, indexed by base-4 digits (I=0, X=1, Y=2,
/// Z=3) with the first qubit most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliExpectations {
    k: usize,
    values: Vec<f64>,
}

fn pauli_digit(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

const DIGIT_PAULI: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl PauliExpectations {
    pub fn new(k: usize, values: Vec<f64>) -> Result<Self, TomographyError> {
        check_size(k)?;
        if values.len() != 1 << (2 * k) {
            return Err(TomographyError::ProbabilityShape(k));
        }
        Ok(PauliExpectations { k, values })
    }

    pub fn n_qubits(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pauli(&self, index: usize) -> LocalPauli {
        let mut p = LocalPauli::identity(self.k);
        for i in 0..self.k {
            p.set(i, DIGIT_PAULI[(index >> (2 * (self.k - 1 - i))) & 3]);
        }
        p
    }

    pub fn index_of(pauli: &LocalPauli) -> usize {
        (0..pauli.len()).fold(0, |acc, i| acc * 4 + pauli_digit(pauli.get(i)))
    }

    /// Expectation of `pauli`, including its sign.
    pub fn get(&self, pauli: &LocalPauli) -> f64 {
        let v = self.values[Self::index_of(pauli)];
        if pauli.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Labeled values such as `("IXZ", 0.98)`, in index order.
    pub fn labeled(&self) -> Vec<(String, f64)> {
        (0..self.values.len())
            .map(|i| {
                let label = (0..self.k).map(|q| self.pauli(i).get(q).as_char()).collect();
                (label, self.values[i])
            })
            .collect()
    }
}

/// In-place Walsh-Hadamard transform: `out[m] = Σ_b v[b] (-1)^{popcount(b & m)}`.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Pauli expectations from per-setting outcome probabilities (setting
/// order). A Pauli with identity positions is the mean of its parity
/// estimate over every setting that agrees with it off the identities.
pub fn expectations_from_probabilities(
    k: usize,
    probabilities: &[Vec<f64>],
) -> Result<PauliExpectations, TomographyError> {
    check_size(k)?;
    let n_settings = 3usize.pow(k as u32);
    let dim = 1usize << k;
    if probabilities.len() != n_settings || probabilities.iter().any(|p| p.len() != dim) {
        return Err(TomographyError::ProbabilityShape(k));
    }
    let mut sums = vec![0.0; 1 << (2 * k)];
    let mut counts = vec![0u32; 1 << (2 * k)];
    for (s, probs) in probabilities.iter().enumerate() {
        let setting = BasisSetting::from_index(k, s);
        let mut parities = probs.clone();
        walsh_hadamard(&mut parities);
        for (mask, &value) in parities.iter().enumerate() {
            let index = setting.bases().iter().enumerate().fold(0, |acc, (i, b)| {
                let digit = if (mask >> (k - 1 - i)) & 1 == 1 {
                    match b {
                        Basis::X => 1,
                        Basis::Y => 2,
                        Basis::Z => 3,
                    }
                } else {
                    0
                };
                acc * 4 + digit
            });
            sums[index] += value;
            counts[index] += 1;
        }
    }
    let mut values: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| (s / c as f64).clamp(-1.0, 1.0)).collect();
    values[0] = 1.0;
    PauliExpectations::new(k, values)
}

pub fn estimate_pauli_expectations(dataset: &TomographyDataset) -> PauliExpectations {
    expectations_from_probabilities(dataset.n_qubits(), &dataset.probabilities()).expect("datasets are complete")
}

/// `ρ = 2^{-k} Σ_P ⟨P⟩ P`. Hermitian with unit trace; not necessarily
/// positive.
pub fn linear_inversion(expectations: &PauliExpectations) -> CMatrix {
    let k = expectations.n_qubits();
    let dim = 1usize << k;
    let scale = 1.0 / dim as f64;
    let mut m = CMatrix::zeros(dim, dim);
    for (i, &value) in expectations.values().iter().enumerate() {
        if value == 0.0 {
            continue;
        }
        let p = expectations.pauli(i);
        let x = p.x_mask() as usize;
        for j in 0..dim {
            m[(j ^ x, j)] += pauli_phase(&p, j) * Complex64::new(value * scale, 0.0);
        }
    }
    let adjoint = m.adjoint();
    (m + adjoint).scale(0.5)
}

/// Closest density matrix in Frobenius norm: project the spectrum onto the
/// probability simplex and keep the eigenvectors.
pub fn nearest_physical_density_matrix(h: &CMatrix, qubits: Vec<usize>) -> Result<DensityMatrix, TomographyError> {
    let expected = 1usize << qubits.len();
    if h.nrows() != expected || h.ncols() != expected {
        return Err(DensityError::Dimension { rows: h.nrows(), cols: h.ncols(), expected, qubits: qubits.len() }.into());
    }
    let deviation = hermitian_deviation(h);
    if deviation > INPUT_TOL {
        return Err(DensityError::NotHermitian(deviation).into());
    }
    let trace = h.trace();
    if (trace.re - 1.0).abs() > INPUT_TOL {
        return Err(DensityError::Trace(trace.re).into());
    }
    let (values, vectors) = hermitian_eigen(h);
    let matrix = if values.first().is_some_and(|&l| l >= 0.0) {
        let adjoint = h.adjoint();
        (h + adjoint).scale(0.5)
    } else {
        compose_hermitian(&vectors, &project_to_simplex(&values))
    };
    Ok(DensityMatrix::new(qubits, normalize_trace(matrix))?)
}

fn normalize_trace(mut m: CMatrix) -> CMatrix {
    let trace = m.trace().re;
    for i in 0..m.nrows() {
        m[(i, i)].im = 0.0;
    }
    m.scale_mut(1.0 / trace);
    m
}

/// Expectations, linear inversion and projection in one step.
pub fn reconstruct(qubits: &[usize], probabilities: &[Vec<f64>]) -> Result<DensityMatrix, TomographyError> {
    let expectations = expectations_from_probabilities(qubits.len(), probabilities)?;
    nearest_physical_density_matrix(&linear_inversion(&expectations), qubits.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::expectation;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn setting_lists() {
        let names = |k| tomography_settings(k).unwrap().iter().map(|s| alloc::format!("{s}")).collect::<Vec<_>>();
        assert_eq!(names(1), ["X", "Y", "Z"]);
        assert_eq!(names(2).len(), 9);
        assert_eq!(names(2)[0], "XX");
        assert_eq!(names(2)[8], "ZZ");
        assert_eq!(tomography_settings(5).unwrap().len(), 243);
        assert_eq!(tomography_settings(0), Err(TomographyError::Size(0)));
        assert_eq!(tomography_settings(6), Err(TomographyError::Size(6)));
    }

    #[test]
    fn zero_state_expectations() {
        // |0⟩: X and Y outcomes uniform, Z always 0.
        let probs = vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![1.0, 0.0]];
        let e = expectations_from_probabilities(1, &probs).unwrap();
        assert_eq!(e.values(), &[1.0, 0.0, 0.0, 1.0]);
        let rho = linear_inversion(&e);
        assert_eq!(rho[(0, 0)], c(1.0));
        assert_eq!(rho[(1, 1)], c(0.0));
    }

    #[test]
    fn identity_only_gives_maximally_mixed() {
        let mut values = vec![0.0; 16];
        values[0] = 1.0;
        let rho = linear_inversion(&PauliExpectations::new(2, values).unwrap());
        assert!((rho - CMatrix::from_diagonal_element(4, 4, c(0.25))).norm() < 1e-15);
    }

    #[test]
    fn inversion_round_trip() {
        let mut values: Vec<f64> = (0..64).map(|i| ((i * 37 % 17) as f64 / 17.0) - 0.5).collect();
        values[0] = 1.0;
        let e = PauliExpectations::new(3, values).unwrap();
        let rho = linear_inversion(&e);
        for i in 0..64 {
            assert!((expectation(&rho, &e.pauli(i)) - e.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_projection_examples() {
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.2), c(-0.2)]));
        let rho = nearest_physical_density_matrix(&h, vec![0]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(rho.matrix()[(1, 1)].norm() < 1e-12);

        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.6), c(0.6), c(-0.2), c(0.0)]));
        let rho = nearest_physical_density_matrix(&h, vec![0, 1]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| rho.matrix()[(i, i)].re).collect();
        for (got, want) in diag.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{diag:?}");
        }
    }

    #[test]
    fn physical_input_is_unchanged() {
        let mut h = CMatrix::from_diagonal_element(2, 2, c(0.5));
        h[(0, 1)] = Complex64::new(0.1, 0.2);
        h[(1, 0)] = Complex64::new(0.1, -0.2);
        let rho = nearest_physical_density_matrix(&h, vec![3]).unwrap();
        assert_eq!(rho.matrix(), &h);
    }

    #[test]
    fn pooled_identity_marginals() {
        // Two qubits, qubit 0 always reads 0 and qubit 1 uniform in every basis.
        let probs = vec![vec![0.5, 0.5, 0.0, 0.0]; 9];
        let e = expectations_from_probabilities(2, &probs).unwrap();
        let zi = LocalPauli::parse("ZI").unwrap();
        let xi = LocalPauli::parse("XI").unwrap();
        let iz = LocalPauli::parse("IZ").unwrap();
        assert_eq!(e.get(&zi), 1.0);
        assert_eq!(e.get(&xi), 1.0);
        assert_eq!(e.get(&iz), 0.0);
    }
}
