//! Simulated device noise: independent per-qubit readout flips plus
//! depolarizing Pauli errors after gate layers.

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::pauli::Pauli;

/// Largest readout error rate produced by [`sample_readout_rates`]; keeps the
/// calibration matrices well away from singular.
pub const MAX_SAMPLED_READOUT_RATE: f64 = 0.45;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NoiseError {
    #[error("{what} = {value} is not a probability")]
    NotAProbability { what: &'static str, value: f64 },
    #[error("readout profile covers {got} qubits, device has {expected}")]
    QubitCount { got: usize, expected: usize },
    #[error("invalid readout-rate distribution: mean {mean}, stddev {stddev}")]
    Distribution { mean: f64, stddev: f64 },
}

fn check_probability(what: &'static str, value: f64) -> Result<f64, NoiseError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(NoiseError::NotAProbability { what, value })
    }
}

/// Classical readout flip probabilities of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutError {
    p1_given0: f64,
    p0_given1: f64,
}

impl ReadoutError {
    pub const NONE: ReadoutError = ReadoutError { p1_given0: 0.0, p0_given1: 0.0 };

    pub fn new(p1_given0: f64, p0_given1: f64) -> Result<Self, NoiseError> {
        Ok(ReadoutError {
            p1_given0: check_probability("p(1|0)", p1_given0)?,
            p0_given1: check_probability("p(0|1)", p0_given1)?,
        })
    }

    pub fn symmetric(rate: f64) -> Result<Self, NoiseError> {
        ReadoutError::new(rate, rate)
    }

    pub fn p1_given0(&self) -> f64 {
        self.p1_given0
    }

    pub fn p0_given1(&self) -> f64 {
        self.p0_given1
    }

    /// Average assignment error, as quoted in device calibration data.
    pub fn rate(&self) -> f64 {
        0.5 * (self.p1_given0 + self.p0_given1)
    }

    /// Column-stochastic matrix `[[p(0|0), p(0|1)], [p(1|0), p(1|1)]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p1_given0, self.p0_given1], [self.p1_given0, 1.0 - self.p0_given1]]
    }

    /// Apply a readout flip to an ideal outcome bit.
    pub fn apply<R: Rng + ?Sized>(&self, bit: bool, rng: &mut R) -> bool {
        let p = if bit { self.p0_given1 } else { self.p1_given0 };
        if p > 0.0 && rng.random::<f64>() < p {
            !bit
        } else {
            bit
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    readout: Vec<ReadoutError>,
    cz_depolarizing: f64,
    single_qubit_depolarizing: f64,
}

impl NoiseModel {
    pub fn new(
        readout: Vec<ReadoutError>,
        cz_depolarizing: f64,
        single_qubit_depolarizing: f64,
    ) -> Result<Self, NoiseError> {
        Ok(NoiseModel {
            readout,
            cz_depolarizing: check_probability("CZ depolarizing", cz_depolarizing)?,
            single_qubit_depolarizing: check_probability("single-qubit depolarizing", single_qubit_depolarizing)?,
        })
    }

    pub fn noiseless(n_qubits: usize) -> Self {
        NoiseModel {
            readout: alloc::vec![ReadoutError::NONE; n_qubits],
            cz_depolarizing: 0.0,
            single_qubit_depolarizing: 0.0,
        }
    }

    pub fn with_gate_noise(mut self, cz: f64, single_qubit: f64) -> Result<Self, NoiseError> {
        self.cz_depolarizing = check_probability("CZ depolarizing", cz)?;
        self.single_qubit_depolarizing = check_probability("single-qubit depolarizing", single_qubit)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.readout.len()
    }

    pub fn readout(&self, q: usize) -> &ReadoutError {
        &self.readout[q]
    }

    pub fn readout_errors(&self) -> &[ReadoutError] {
        &self.readout
    }

    pub fn cz_depolarizing(&self) -> f64 {
        self.cz_depolarizing
    }

    pub fn single_qubit_depolarizing(&self) -> f64 {
        self.single_qubit_depolarizing
    }

    pub fn has_gate_noise(&self) -> bool {
        self.cz_depolarizing > 0.0 || self.single_qubit_depolarizing > 0.0
    }

    pub fn check_qubits(&self, n_qubits: usize) -> Result<(), NoiseError> {
        if self.readout.len() == n_qubits {
            Ok(())
        } else {
            Err(NoiseError::QubitCount { got: self.readout.len(), expected: n_qubits })
        }
    }

    /// Draw the Pauli error of a single-qubit depolarizing channel.
    pub fn single_qubit_error<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Pauli> {
        depolarizing_1q(self.single_qubit_depolarizing, rng)
    }

    /// Draw the Pauli error of a two-qubit depolarizing channel after a CZ.
    pub fn cz_error<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(Pauli, Pauli)> {
        let p = self.cz_depolarizing;
        if p == 0.0 || rng.random::<f64>() >= p {
            return None;
        }
        const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let which = rng.random_range(1..16usize);
        Some((PAULIS[which / 4], PAULIS[which % 4]))
    }
}

fn depolarizing_1q<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Option<Pauli> {
    if p == 0.0 || rng.random::<f64>() >= p {
        return None;
    }
    Some([Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3usize)])
}

/// Per-qubit symmetric readout rates from a normal distribution truncated to
/// `[0, MAX_SAMPLED_READOUT_RATE]`. The location of the underlying normal is
/// shifted so that the truncated distribution has mean `mean`; `stddev` is
/// the scale of the underlying normal.
pub fn sample_readout_rates<R: Rng + ?Sized>(
    n_qubits: usize,
    mean: f64,
    stddev: f64,
    rng: &mut R,
) -> Result<Vec<ReadoutError>, NoiseError> {
    let bad = NoiseError::Distribution { mean, stddev };
    if !(0.0..MAX_SAMPLED_READOUT_RATE).contains(&mean) || stddev.is_nan() || stddev < 0.0 {
        return Err(bad);
    }
    if stddev == 0.0 {
        return Ok(alloc::vec![ReadoutError::symmetric(mean)?; n_qubits]);
    }
    let location = truncated_normal_location(mean, stddev, 0.0, MAX_SAMPLED_READOUT_RATE);
    let normal = Normal::new(location, stddev).map_err(|_| bad)?;
    (0..n_qubits)
        .map(|_| loop {
            let r = normal.sample(rng);
            if (0.0..=MAX_SAMPLED_READOUT_RATE).contains(&r) {
                break ReadoutError::symmetric(r);
            }
        })
        .collect()
}

/// Readout errors shifted by independent `N(0, stddev)` draws per qubit and
/// flip direction, clamped to `[0, MAX_SAMPLED_READOUT_RATE]`. Models
/// calibration drift between runs.
pub fn drift_readout<R: Rng + ?Sized>(
    errors: &[ReadoutError],
    stddev: f64,
    rng: &mut R,
) -> Result<Vec<ReadoutError>, NoiseError> {
    let bad = NoiseError::Distribution { mean: 0.0, stddev };
    if stddev.is_nan() || stddev < 0.0 {
        return Err(bad);
    }
    let normal = Normal::new(0.0, stddev).map_err(|_| bad)?;
    let mut shift = |p: f64| (p + normal.sample(rng)).clamp(0.0, MAX_SAMPLED_READOUT_RATE);
    errors
        .iter()
        .map(|r| {
            let p1_given0 = shift(r.p1_given0());
            ReadoutError::new(p1_given0, shift(r.p0_given1()))
        })
        .collect()
}

fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI)
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Mean of `N(location, scale)` truncated to `[lo, hi]`.
pub fn truncated_normal_mean(location: f64, scale: f64, lo: f64, hi: f64) -> f64 {
    let (a, b) = ((lo - location) / scale, (hi - location) / scale);
    let mass = std_normal_cdf(b) - std_normal_cdf(a);
    location + scale * (std_normal_pdf(a) - std_normal_pdf(b)) / mass
}

/// Location whose truncation to `[lo, hi]` has mean `target`, by bisection
/// (the truncated mean is increasing in the location).
fn truncated_normal_location(target: f64, scale: f64, lo: f64, hi: f64) -> f64 {
    let (mut left, mut right) = (lo - 8.0 * scale, hi);
    for _ in 0..200 {
        let mid = 0.5 * (left + right);
        if truncated_normal_mean(mid, scale, lo, hi) < target {
            left = mid;
        } else {
            right = mid;
        }
    }
    0.5 * (left + right)
}
