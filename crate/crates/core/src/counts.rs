//! Measurement bases and outcome count tables.
//!
//! Outcome bitstrings list qubits in the order of the table's qubit list:
//! character 0 belongs to the first qubit. Dense count vectors use the same
//! order with character 0 as the most significant bit of the index.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'X' => Some(Basis::X),
            'Y' => Some(Basis::Y),
            'Z' => Some(Basis::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    /// Symplectic bits (x, z) of the measured observable.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Basis::X => (true, false),
            Basis::Y => (true, true),
            Basis::Z => (false, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountsError {
    #[error("invalid basis symbol {0:?}; expected X, Y or Z")]
    InvalidBasis(char),
    #[error("basis setting has {setting} symbols for {qubits} qubits")]
    SettingLength { setting: usize, qubits: usize },
    #[error("outcome {0:?} is not a bitstring of the table width")]
    InvalidOutcome(String),
    #[error("counts sum to {sum} but the table records {shots} shots")]
    ShotMismatch { sum: u64, shots: u64 },
    #[error("a counts table needs at least one shot")]
    NoShots,
    #[error("dense counts have length {len}; expected {expected}")]
    DenseLength { len: usize, expected: usize },
}

/// One local measurement basis per measured qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisSetting(Vec<Basis>);

impl BasisSetting {
    pub fn new(bases: Vec<Basis>) -> Self {
        BasisSetting(bases)
    }

    pub fn parse(s: &str) -> Result<Self, CountsError> {
        s.chars()
            .map(|c| Basis::from_char(c).ok_or(CountsError::InvalidBasis(c)))
            .collect::<Result<Vec<_>, _>>()
            .map(BasisSetting)
    }

    /// Every qubit measured in Z.
    pub fn computational(k: usize) -> Self {
        BasisSetting(vec![Basis::Z; k])
    }

    pub fn bases(&self) -> &[Basis] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of this setting in the lexicographic list of all `3^k`
    /// settings (X < Y < Z).
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, b| acc * 3 + *b as usize)
    }

    /// Inverse of [`BasisSetting::index`].
    pub fn from_index(k: usize, mut index: usize) -> Self {
        let mut bases = vec![Basis::X; k];
        for slot in bases.iter_mut().rev() {
            *slot = Basis::ALL[index % 3];
            index /= 3;
        }
        BasisSetting(bases)
    }

    /// Big-endian (x, z) masks of the measured observables.
    pub fn masks(&self) -> (u32, u32) {
        let k = self.0.len();
        let mut x = 0;
        let mut z = 0;
        for (i, b) in self.0.iter().enumerate() {
            let bit = 1u32 << (k - 1 - i);
            let (bx, bz) = b.bits();
            if bx {
                x |= bit;
            }
            if bz {
                z |= bit;
            }
        }
        (x, z)
    }
}

impl fmt::Display for BasisSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

/// Outcome index to bitstring, character 0 most significant.
pub fn index_to_bitstring(index: usize, width: usize) -> String {
    (0..width).map(|i| if (index >> (width - 1 - i)) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn bitstring_to_index(s: &str) -> Option<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Some(acc << 1),
        '1' => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Outcome counts of one measurement setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountsTable {
    setting: BasisSetting,
    qubits: Vec<usize>,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl CountsTable {
    pub fn new(
        setting: BasisSetting,
        qubits: Vec<usize>,
        shots: u64,
        counts: BTreeMap<String, u64>,
    ) -> Result<Self, CountsError> {
        if setting.len() != qubits.len() {
            return Err(CountsError::SettingLength { setting: setting.len(), qubits: qubits.len() });
        }
        if shots == 0 {
            return Err(CountsError::NoShots);
        }
        for key in counts.keys() {
            if key.len() != qubits.len() || key.chars().any(|c| c != '0' && c != '1') {
                return Err(CountsError::InvalidOutcome(key.clone()));
            }
        }
        let sum: u64 = counts.values().sum();
        if sum != shots {
            return Err(CountsError::ShotMismatch { sum, shots });
        }
        let counts = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok(CountsTable { setting, qubits, shots, counts })
    }

    /// Build from a dense vector indexed by outcome.
    pub fn from_dense(setting: BasisSetting, qubits: Vec<usize>, dense: &[u64]) -> Result<Self, CountsError> {
        let expected = 1usize << qubits.len();
        if dense.len() != expected {
            return Err(CountsError::DenseLength { len: dense.len(), expected });
        }
        let counts = dense
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(i, &c)| (index_to_bitstring(i, qubits.len()), c))
            .collect();
        let shots = dense.iter().sum();
        CountsTable::new(setting, qubits, shots, counts)
    }

    pub fn setting(&self) -> &BasisSetting {
        &self.setting
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    /// Dense counts indexed by outcome. Only sensible for narrow tables.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut dense = vec![0; 1usize << self.qubits.len()];
        for (key, &c) in &self.counts {
            dense[bitstring_to_index(key).unwrap_or(0)] += c;
        }
        dense
    }

    /// Empirical outcome frequencies, dense.
    pub fn frequencies(&self) -> Vec<f64> {
        let shots = self.shots as f64;
        self.to_dense().into_iter().map(|c| c as f64 / shots).collect()
    }

    /// Dense joint counts of the qubits at `positions` (indices into the
    /// table's qubit list), first position most significant.
    pub fn marginal(&self, positions: &[usize]) -> Vec<u64> {
        let mut dense = vec![0; 1usize << positions.len()];
        for (key, &c) in &self.counts {
            let bytes = key.as_bytes();
            let index = positions.iter().fold(0usize, |acc, &p| (acc << 1) | (bytes[p] == b'1') as usize);
            dense[index] += c;
        }
        dense
    }

    /// Number of shots in which the qubit at `position` read 1.
    pub fn ones_at(&self, position: usize) -> u64 {
        self.counts.iter().filter(|(k, _)| k.as_bytes()[position] == b'1').map(|(_, &c)| c).sum()
    }
}
