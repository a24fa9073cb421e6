//! Bias-corrected percentile bootstrap for negativity estimates.
//!
//! Tomography data and calibration data are resampled separately. Each
//! replicate resamples (or draws) the calibration, applies readout
//! correction to the measured probabilities, redraws every setting
//! multinomially from the corrected distribution and reruns the estimator.

use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use crate::analysis::MAX_NEGATIVITY;
use crate::counts::CountsTable;
use crate::qrem::{matrices_from_marginals, qrem_correct, CalibrationMatrix, QremError};
use crate::rng::stream;
use crate::sampling::multinomial;

pub const MIN_REPLICATES: usize = 100;
pub const DEFAULT_REPLICATES: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("{0} bootstrap replicates requested; at least {MIN_REPLICATES} are required")]
    TooFewReplicates(usize),
    #[error("confidence level {0} is not in (0, 1)")]
    Level(f64),
    #[error("only {succeeded} of {required} bootstrap replicates succeeded: {reason}")]
    Replicates { succeeded: usize, required: usize, reason: String },
    #[error("point estimate failed: {0}")]
    Estimate(String),
    #[error(transparent)]
    Qrem(#[from] QremError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapConfig {
    replicates: usize,
    level: f64,
    seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { replicates: DEFAULT_REPLICATES, level: DEFAULT_LEVEL, seed: 0 }
    }
}

impl BootstrapConfig {
    pub fn new(replicates: usize, level: f64, seed: u64) -> Result<Self, StatsError> {
        if replicates < MIN_REPLICATES {
            return Err(StatsError::TooFewReplicates(replicates));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(StatsError::Level(level));
        }
        Ok(BootstrapConfig { replicates, level, seed })
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        BootstrapConfig { seed, ..self }
    }
}

/// Multinomial redraw of a table from its own frequencies.
pub fn resample_counts<R: Rng + ?Sized>(table: &CountsTable, rng: &mut R) -> CountsTable {
    let keys: Vec<&String> = table.counts().keys().collect();
    let shots = table.shots();
    let probs: Vec<f64> = table.counts().values().map(|&c| c as f64 / shots as f64).collect();
    let drawn = multinomial(shots, &probs, rng);
    let counts = keys.into_iter().cloned().zip(drawn).filter(|&(_, c)| c > 0).collect();
    CountsTable::new(table.setting().clone(), table.qubits().to_vec(), shots, counts)
        .expect("resampling keeps shot totals")
}

/// Calibration data of the measured qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum PairCalibration {
    /// No readout correction.
    Uncorrected,
    /// One calibration run, as dense joint counts over the measured qubits
    /// under the all-zeros and all-ones preparations. Replicates redraw both
    /// multinomially.
    SingleSnapshot { zero: Vec<u64>, one: Vec<u64> },
    /// Per-snapshot matrices for the measured qubits. Replicates draw one
    /// snapshot uniformly; the point estimate uses their element-wise mean.
    MultiSnapshot(Vec<Vec<CalibrationMatrix>>),
}

impl PairCalibration {
    /// Joint calibration counts of `qubits`, taken from device-wide tables.
    pub fn single_snapshot(zero: &CountsTable, one: &CountsTable, qubits: &[usize]) -> Result<Self, QremError> {
        let positions = |t: &CountsTable| {
            qubits
                .iter()
                .map(|q| t.qubits().iter().position(|p| p == q))
                .collect::<Option<Vec<_>>>()
                .ok_or(QremError::QubitMismatch)
        };
        Ok(PairCalibration::SingleSnapshot {
            zero: zero.marginal(&positions(zero)?),
            one: one.marginal(&positions(one)?),
        })
    }

    /// Measured probabilities corrected with the point-estimate matrices.
    pub fn correct(&self, qubits: &[usize], probabilities: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, QremError> {
        corrected(probabilities, &self.point_matrices(qubits)?)
    }

    fn point_matrices(&self, qubits: &[usize]) -> Result<Option<Vec<CalibrationMatrix>>, QremError> {
        match self {
            PairCalibration::Uncorrected => Ok(None),
            PairCalibration::SingleSnapshot { zero, one } => joint_matrices(qubits, zero, one).map(Some),
            PairCalibration::MultiSnapshot(snapshots) => {
                let k = qubits.len();
                Ok(Some(
                    (0..k)
                        .map(|i| {
                            let column: Vec<_> = snapshots.iter().map(|s| s[i]).collect();
                            CalibrationMatrix::mean(&column)
                        })
                        .collect(),
                ))
            }
        }
    }

    fn replicate_matrices<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<Option<Vec<CalibrationMatrix>>, QremError> {
        match self {
            PairCalibration::Uncorrected => Ok(None),
            PairCalibration::SingleSnapshot { zero, one } => {
                let redraw = |dense: &Vec<u64>, rng: &mut R| {
                    let shots: u64 = dense.iter().sum();
                    let probs: Vec<f64> = dense.iter().map(|&c| c as f64 / shots as f64).collect();
                    multinomial(shots, &probs, rng)
                };
                let zero = redraw(zero, rng);
                let one = redraw(one, rng);
                joint_matrices(qubits, &zero, &one).map(Some)
            }
            PairCalibration::MultiSnapshot(snapshots) => {
                Ok(Some(snapshots[rng.random_range(0..snapshots.len())].clone()))
            }
        }
    }
}

fn ones_per_position(dense: &[u64], k: usize) -> Vec<u64> {
    (0..k)
        .map(|i| dense.iter().enumerate().filter(|(index, _)| (index >> (k - 1 - i)) & 1 == 1).map(|(_, &c)| c).sum())
        .collect()
}

fn joint_matrices(qubits: &[usize], zero: &[u64], one: &[u64]) -> Result<Vec<CalibrationMatrix>, QremError> {
    let k = qubits.len();
    matrices_from_marginals(
        qubits,
        &ones_per_position(zero, k),
        zero.iter().sum(),
        &ones_per_position(one, k),
        one.iter().sum(),
    )
}

fn corrected(
    probabilities: &[Vec<f64>],
    matrices: &Option<Vec<CalibrationMatrix>>,
) -> Result<Vec<Vec<f64>>, QremError> {
    match matrices {
        None => Ok(probabilities.to_vec()),
        Some(m) => probabilities.iter().map(|p| qrem_correct(p, m)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult {
    pub estimate: f64,
    /// Replicate values before correction, in replicate order.
    pub replicates: Vec<f64>,
    /// Shifted and clamped replicate values, in replicate order.
    pub corrected: Vec<f64>,
    pub mean: f64,
    /// Mean over nonzero replicates, used for the shift.
    pub nonzero_mean: f64,
    pub shift: f64,
    pub lower: f64,
    pub upper: f64,
    /// Bounds of the shifted distribution before clamping.
    pub raw_lower: f64,
    pub raw_upper: f64,
}

impl BootstrapResult {
    pub fn entangled(&self) -> bool {
        self.lower > 0.0
    }
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let position = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let below = libm::floor(position) as usize;
    let above = (below + 1).min(sorted.len() - 1);
    let t = position - below as f64;
    sorted[below] + t * (sorted[above] - sorted[below])
}

/// Mean accumulated relative to the first value, so constant data has an
/// exact mean. Empty data has mean 0.
fn centered_mean(values: &[f64]) -> f64 {
    let Some(&first) = values.first() else {
        return 0.0;
    };
    first + values.iter().map(|v| v - first).sum::<f64>() / values.len() as f64
}

/// Shift replicates by `estimate - mean`, where the mean skips replicates
/// equal to zero, clamp to `[0, 0.5]` and take the `(1 ± level)/2`
/// percentiles.
pub fn bias_corrected_interval(estimate: f64, replicates: Vec<f64>, level: f64) -> BootstrapResult {
    let mean = centered_mean(&replicates);
    let nonzero: Vec<f64> = replicates.iter().copied().filter(|&r| r != 0.0).collect();
    let nonzero_mean = centered_mean(&nonzero);
    let shift = estimate - nonzero_mean;
    let mut shifted: Vec<f64> = replicates.iter().map(|r| r + shift).collect();
    let corrected: Vec<f64> = shifted.iter().map(|v| v.clamp(0.0, MAX_NEGATIVITY)).collect();
    shifted.sort_by(f64::total_cmp);
    let mut sorted = corrected.clone();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = ((1.0 - level) / 2.0, (1.0 + level) / 2.0);
    BootstrapResult {
        estimate,
        mean,
        nonzero_mean,
        shift,
        lower: percentile(&sorted, lo),
        upper: percentile(&sorted, hi),
        raw_lower: percentile(&shifted, lo),
        raw_upper: percentile(&shifted, hi),
        replicates,
        corrected,
    }
}

/// Bootstrap an estimator of per-setting outcome probabilities.
///
/// `probabilities` are the measured frequencies in setting order, `shots`
/// the shots per setting. `estimator` maps corrected probabilities to a
/// negativity. Replicate `r` uses the RNG stream `[r]` of the config seed.
pub fn bootstrap_negativity<F, E>(
    qubits: &[usize],
    probabilities: &[Vec<f64>],
    shots: u64,
    calibration: &PairCalibration,
    config: &BootstrapConfig,
    estimator: F,
) -> Result<BootstrapResult, StatsError>
where
    F: Fn(&[Vec<f64>]) -> Result<f64, E>,
    E: core::fmt::Display,
{
    let point = calibration.correct(qubits, probabilities)?;
    let estimate = estimator(&point).map_err(|e| StatsError::Estimate(alloc::format!("{e}")))?;
    let mut replicates = Vec::with_capacity(config.replicates);
    let mut failure = None;
    for r in 0..config.replicates {
        let mut rng = stream(config.seed, &[r as u64]);
        let outcome = calibration
            .replicate_matrices(qubits, &mut rng)
            .and_then(|m| corrected(probabilities, &m))
            .map_err(|e| alloc::format!("{e}"))
            .and_then(|fresh| {
                let redrawn: Vec<Vec<f64>> = fresh
                    .iter()
                    .map(|p| multinomial(shots, p, &mut rng).into_iter().map(|c| c as f64 / shots as f64).collect())
                    .collect();
                estimator(&redrawn).map_err(|e| alloc::format!("{e}"))
            });
        match outcome {
            Ok(v) => replicates.push(v),
            Err(reason) => failure = Some(reason),
        }
    }
    if let Some(reason) = failure {
        return Err(StatsError::Replicates { succeeded: replicates.len(), required: config.replicates, reason });
    }
    Ok(bias_corrected_interval(estimate, replicates, config.level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::BasisSetting;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    #[test]
    fn config_validation() {
        assert_eq!(BootstrapConfig::new(99, 0.95, 0), Err(StatsError::TooFewReplicates(99)));
        assert_eq!(BootstrapConfig::new(100, 1.0, 0), Err(StatsError::Level(1.0)));
        assert_eq!(BootstrapConfig::default().replicates(), 1000);
    }

    #[test]
    fn single_outcome_resamples_to_itself() {
        let mut counts = BTreeMap::new();
        counts.insert(String::from("01"), 4000);
        let t = CountsTable::new(BasisSetting::parse("ZZ").unwrap(), vec![0, 1], 4000, counts).unwrap();
        let mut rng = stream(1, &[]);
        assert_eq!(resample_counts(&t, &mut rng), t);
    }

    #[test]
    fn percentile_interpolates() {
        let data = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&data, 0.5), 2.0);
        assert_eq!(percentile(&data, 0.125), 0.5);
        assert_eq!(percentile(&data, 1.0), 4.0);
    }

    #[test]
    fn zero_variance_interval() {
        let r = bias_corrected_interval(0.3, vec![0.3; 200], 0.95);
        assert_eq!((r.lower, r.upper, r.shift), (0.3, 0.3, 0.0));
    }

    #[test]
    fn zero_replicates_are_ignored_in_the_shift() {
        let r = bias_corrected_interval(0.2, vec![0.0, 0.1, 0.3], 0.95);
        assert!((r.nonzero_mean - 0.2).abs() < 1e-15);
        assert!((r.mean - 0.4 / 3.0).abs() < 1e-15);
        assert_eq!(r.shift, 0.2 - r.nonzero_mean);
        assert_eq!(r.corrected[0], 0.0);
    }

    #[test]
    fn all_zero_replicates() {
        let r = bias_corrected_interval(0.0, vec![0.0; 100], 0.95);
        assert_eq!((r.lower, r.upper), (0.0, 0.0));
        assert!(!r.entangled());
    }
}
