//! Readout-error mitigation under the uncorrelated-readout assumption.
//!
//! Each qubit has a 2×2 column-stochastic calibration matrix
//! `[[p(0|0), p(0|1)], [p(1|0), p(1|1)]]`; the device matrix is their
//! Kronecker product and is only ever applied one factor at a time.

use alloc::string::String;
use alloc::vec::Vec;

use crate::counts::CountsTable;

/// Calibration matrices with |det| below this are rejected.
pub const SINGULAR_THRESHOLD: f64 = 1e-6;
const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QremError {
    #[error("calibration matrix of qubit {qubit} is singular (determinant {determinant:e})")]
    Singular { qubit: usize, determinant: f64 },
    #[error("calibration entries {0:?} are not a column-stochastic matrix")]
    NotStochastic([f64; 4]),
    #[error("probability vector of length {len} does not match {qubits} qubits")]
    Length { len: usize, qubits: usize },
    #[error("calibration tables measure different qubits")]
    QubitMismatch,
    #[error("calibration tables must be measured in the computational basis")]
    NotComputational,
    #[error("no calibration for qubit {qubit} in snapshot {snapshot:?}")]
    MissingQubit { snapshot: String, qubit: usize },
    #[error("snapshot {snapshot:?} lists qubit {qubit} more than once")]
    RepeatedQubit { snapshot: String, qubit: usize },
    #[error("snapshot {0:?} covers a different qubit set from the first snapshot")]
    Coverage(String),
    #[error("a calibration set needs at least one snapshot")]
    Empty,
}

/// Conditional readout probabilities of one qubit; `pxy` is `p(x|y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationMatrix {
    p00: f64,
    p10: f64,
    p01: f64,
    p11: f64,
}

impl CalibrationMatrix {
    pub const IDENTITY: CalibrationMatrix = CalibrationMatrix { p00: 1.0, p10: 0.0, p01: 0.0, p11: 1.0 };

    pub fn new(p00: f64, p10: f64, p01: f64, p11: f64) -> Result<Self, QremError> {
        let entries = [p00, p10, p01, p11];
        let in_range = entries.iter().all(|p| (0.0..=1.0).contains(p));
        if !in_range || (p00 + p10 - 1.0).abs() > STOCHASTIC_TOL || (p01 + p11 - 1.0).abs() > STOCHASTIC_TOL {
            return Err(QremError::NotStochastic(entries));
        }
        Ok(CalibrationMatrix { p00, p10, p01, p11 })
    }

    /// From the two flip probabilities; column-stochastic by construction.
    pub fn from_flips(p1_given0: f64, p0_given1: f64) -> Result<Self, QremError> {
        CalibrationMatrix::new(1.0 - p1_given0, p1_given0, p0_given1, 1.0 - p0_given1)
    }

    pub fn p00(&self) -> f64 {
        self.p00
    }
    pub fn p10(&self) -> f64 {
        self.p10
    }
    pub fn p01(&self) -> f64 {
        self.p01
    }
    pub fn p11(&self) -> f64 {
        self.p11
    }

    /// Row-major `[[p(0|0), p(0|1)], [p(1|0), p(1|1)]]`.
    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.p00, self.p01], [self.p10, self.p11]]
    }

    pub fn determinant(&self) -> f64 {
        self.p00 * self.p11 - self.p01 * self.p10
    }

    /// Inverse matrix; `qubit` labels the error.
    pub fn inverse(&self, qubit: usize) -> Result<[[f64; 2]; 2], QremError> {
        let det = self.determinant();
        if det.abs() < SINGULAR_THRESHOLD {
            return Err(QremError::Singular { qubit, determinant: det });
        }
        Ok([[self.p11 / det, -self.p01 / det], [-self.p10 / det, self.p00 / det]])
    }

    /// Element-wise mean of several matrices.
    pub fn mean(matrices: &[CalibrationMatrix]) -> CalibrationMatrix {
        let n = matrices.len().max(1) as f64;
        let sum = |f: fn(&CalibrationMatrix) -> f64| matrices.iter().map(f).sum::<f64>() / n;
        CalibrationMatrix { p00: sum(|m| m.p00), p10: sum(|m| m.p10), p01: sum(|m| m.p01), p11: sum(|m| m.p11) }
    }
}

/// Calibration matrices of one calibration run.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSnapshot {
    label: String,
    qubits: Vec<usize>,
    matrices: Vec<CalibrationMatrix>,
}

impl CalibrationSnapshot {
    pub fn new(label: impl Into<String>, entries: Vec<(usize, CalibrationMatrix)>) -> Result<Self, QremError> {
        let label = label.into();
        let mut entries = entries;
        entries.sort_by_key(|(q, _)| *q);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(QremError::RepeatedQubit { snapshot: label, qubit: w[0].0 });
        }
        let (qubits, matrices) = entries.into_iter().unzip();
        Ok(CalibrationSnapshot { label, qubits, matrices })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Calibrated qubits, ascending.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn matrices(&self) -> &[CalibrationMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, qubit: usize) -> Option<&CalibrationMatrix> {
        self.qubits.binary_search(&qubit).ok().map(|i| &self.matrices[i])
    }

    /// Matrices for `qubits`, in that order.
    pub fn select(&self, qubits: &[usize]) -> Result<Vec<CalibrationMatrix>, QremError> {
        qubits
            .iter()
            .map(|&q| {
                self.matrix(q)
                    .copied()
                    .ok_or_else(|| QremError::MissingQubit { snapshot: self.label.clone(), qubit: q })
            })
            .collect()
    }
}

/// Calibration snapshots taken over an experiment, each covering the same
/// qubits exactly once.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationSet {
    snapshots: Vec<CalibrationSnapshot>,
}

impl CalibrationSet {
    pub fn new(snapshots: Vec<CalibrationSnapshot>) -> Result<Self, QremError> {
        let first = snapshots.first().ok_or(QremError::Empty)?;
        if let Some(bad) = snapshots.iter().find(|s| s.qubits != first.qubits) {
            return Err(QremError::Coverage(bad.label.clone()));
        }
        Ok(CalibrationSet { snapshots })
    }

    /// Require coverage of every qubit `0..n_qubits`.
    pub fn check_device(&self, n_qubits: usize) -> Result<(), QremError> {
        let first = &self.snapshots[0];
        match (0..n_qubits).find(|q| first.matrix(*q).is_none()) {
            Some(qubit) => Err(QremError::MissingQubit { snapshot: first.label.clone(), qubit }),
            None => Ok(()),
        }
    }

    pub fn snapshots(&self) -> &[CalibrationSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Element-wise mean over snapshots for each of `qubits`.
    pub fn mean_matrices(&self, qubits: &[usize]) -> Result<Vec<CalibrationMatrix>, QremError> {
        let per_snapshot = self.snapshots.iter().map(|s| s.select(qubits)).collect::<Result<Vec<_>, _>>()?;
        Ok((0..qubits.len())
            .map(|i| {
                let column: Vec<_> = per_snapshot.iter().map(|m| m[i]).collect();
                CalibrationMatrix::mean(&column)
            })
            .collect())
    }
}

/// Matrices from per-qubit marginals: the number of 1 outcomes under the
/// all-zeros and all-ones preparations.
pub fn matrices_from_marginals(
    qubits: &[usize],
    ones_after_zero: &[u64],
    zero_shots: u64,
    ones_after_one: &[u64],
    one_shots: u64,
) -> Result<Vec<CalibrationMatrix>, QremError> {
    qubits
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let p1_given0 = ones_after_zero[i] as f64 / zero_shots as f64;
            let p1_given1 = ones_after_one[i] as f64 / one_shots as f64;
            let m = CalibrationMatrix::from_flips(p1_given0, 1.0 - p1_given1)?;
            m.inverse(q)?;
            Ok(m)
        })
        .collect()
}

/// Per-qubit calibration matrices from the all-zeros and all-ones
/// calibration circuits. Entry `p(x|y)` is the marginal frequency of
/// outcome `x` on the qubit under preparation `y`.
pub fn build_calibration_matrices(
    zero_counts: &CountsTable,
    one_counts: &CountsTable,
) -> Result<Vec<CalibrationMatrix>, QremError> {
    if zero_counts.qubits() != one_counts.qubits() {
        return Err(QremError::QubitMismatch);
    }
    let computational = |t: &CountsTable| t.setting().bases().iter().all(|b| *b == crate::counts::Basis::Z);
    if !computational(zero_counts) || !computational(one_counts) {
        return Err(QremError::NotComputational);
    }
    let k = zero_counts.qubits().len();
    let zeros: Vec<u64> = (0..k).map(|i| zero_counts.ones_at(i)).collect();
    let ones: Vec<u64> = (0..k).map(|i| one_counts.ones_at(i)).collect();
    matrices_from_marginals(zero_counts.qubits(), &zeros, zero_counts.shots(), &ones, one_counts.shots())
}

fn check_length(len: usize, qubits: usize) -> Result<(), QremError> {
    if qubits < usize::BITS as usize && len == 1usize << qubits {
        Ok(())
    } else {
        Err(QremError::Length { len, qubits })
    }
}

/// Apply `⊗ factors` to `v`, one 2×2 factor per qubit, first factor most
/// significant.
pub fn apply_factorwise(v: &[f64], factors: &[[[f64; 2]; 2]]) -> Vec<f64> {
    let k = factors.len();
    assert_eq!(v.len(), 1usize << k, "vector length");
    let mut out = v.to_vec();
    for (i, m) in factors.iter().enumerate() {
        let stride = 1usize << (k - 1 - i);
        for block in (0..out.len()).step_by(2 * stride) {
            for j in block..block + stride {
                let (a, b) = (out[j], out[j + stride]);
                out[j] = m[0][0] * a + m[0][1] * b;
                out[j + stride] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
    out
}

/// `Λ^{-1} p` without projection; may have negative entries.
pub fn apply_inverse(p_exp: &[f64], matrices: &[CalibrationMatrix]) -> Result<Vec<f64>, QremError> {
    check_length(p_exp.len(), matrices.len())?;
    let inverses = matrices.iter().enumerate().map(|(i, m)| m.inverse(i)).collect::<Result<Vec<_>, _>>()?;
    Ok(apply_factorwise(p_exp, &inverses))
}

/// Correct a measured probability vector and return the closest physical
/// probability vector. A singular factor is reported by its position.
pub fn qrem_correct(p_exp: &[f64], matrices: &[CalibrationMatrix]) -> Result<Vec<f64>, QremError> {
    Ok(project_to_simplex(&apply_inverse(p_exp, matrices)?))
}

/// Euclidean projection onto the probability simplex: shift every entry by
/// a common threshold and clip at zero.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    // Already on the simplex up to rounding in the sum.
    let sum: f64 = v.iter().sum();
    if v.iter().all(|&x| x >= 0.0) && (sum - 1.0).abs() <= 4.0 * f64::EPSILON * v.len() as f64 {
        return v.to_vec();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    v.iter().map(|&x| (x - threshold).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::BasisSetting;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn table(k: usize, entries: &[(&str, u64)]) -> CountsTable {
        let counts: BTreeMap<String, u64> = entries.iter().map(|(s, c)| (String::from(*s), *c)).collect();
        let shots = counts.values().sum();
        CountsTable::new(BasisSetting::computational(k), (0..k).collect(), shots, counts).unwrap()
    }

    #[test]
    fn matrices_from_frequency_ratios() {
        let zero = table(1, &[("0", 900), ("1", 100)]);
        let one = table(1, &[("0", 150), ("1", 850)]);
        let m = build_calibration_matrices(&zero, &one).unwrap()[0];
        assert!((m.p00() - 0.90).abs() < 1e-15);
        assert!((m.p10() - 0.10).abs() < 1e-15);
        assert!((m.p01() - 0.15).abs() < 1e-15);
        assert!((m.p11() - 0.85).abs() < 1e-15);
    }

    #[test]
    fn noiseless_counts_give_identity() {
        let zero = table(3, &[("000", 100)]);
        let one = table(3, &[("111", 100)]);
        let ms = build_calibration_matrices(&zero, &one).unwrap();
        assert!(ms.iter().all(|m| *m == CalibrationMatrix::IDENTITY));
    }

    #[test]
    fn half_flip_is_singular_and_names_the_qubit() {
        let zero = table(2, &[("00", 50), ("01", 50)]);
        let one = table(2, &[("10", 50), ("11", 50)]);
        assert!(matches!(build_calibration_matrices(&zero, &one), Err(QremError::Singular { qubit: 1, .. })));
    }

    #[test]
    fn inverse_correction_by_hand() {
        let m = CalibrationMatrix::from_flips(0.1, 0.1).unwrap();
        let p = qrem_correct(&[0.9, 0.1], &[m]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
        let p = qrem_correct(&[0.5, 0.5], &[m]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_calibration_is_a_no_op() {
        let v = vec![0.1, 0.2, 0.3, 0.4];
        let p = qrem_correct(&v, &[CalibrationMatrix::IDENTITY; 2]).unwrap();
        assert_eq!(p, v);
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            qrem_correct(&[0.5, 0.5], &[CalibrationMatrix::IDENTITY; 2]),
            Err(QremError::Length { len: 2, qubits: 2 })
        );
    }

    #[test]
    fn simplex_examples() {
        let p = project_to_simplex(&[0.6, 0.6, -0.2]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && p[2] == 0.0);
        assert_eq!(project_to_simplex(&[2.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(project_to_simplex(&[0.25, 0.75]), vec![0.25, 0.75]);
    }

    #[test]
    fn set_requires_matching_coverage() {
        let a = CalibrationSnapshot::new("a", vec![(0, CalibrationMatrix::IDENTITY), (1, CalibrationMatrix::IDENTITY)])
            .unwrap();
        let b = CalibrationSnapshot::new("b", vec![(0, CalibrationMatrix::IDENTITY)]).unwrap();
        assert_eq!(CalibrationSet::new(vec![a.clone(), b]), Err(QremError::Coverage(String::from("b"))));
        assert!(CalibrationSnapshot::new(
            "c",
            vec![(0, CalibrationMatrix::IDENTITY), (0, CalibrationMatrix::IDENTITY)]
        )
        .is_err());
        let set = CalibrationSet::new(vec![a]).unwrap();
        assert!(set.check_device(2).is_ok());
        assert!(matches!(set.check_device(3), Err(QremError::MissingQubit { qubit: 2, .. })));
    }
}
