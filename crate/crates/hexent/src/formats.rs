//! JSON documents for topologies, schedules, counts, calibrations, readout
//! profiles and density matrices.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hexent_core::counts::{BasisSetting, CountsTable};
use hexent_core::density::CMatrix;
use hexent_core::noise::ReadoutError;
use hexent_core::qrem::{CalibrationMatrix, CalibrationSnapshot};
use hexent_core::topology::{CzSchedule, DeviceTopology, Edge};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub name: String,
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub edges: Vec<[usize; 2]>,
}

impl TopologyDoc {
    pub fn from_topology(t: &DeviceTopology) -> Self {
        TopologyDoc {
            name: t.name().to_string(),
            n_qubits: t.n_qubits(),
            source: None,
            edges: t.edges().iter().map(|e| [e.a, e.b]).collect(),
        }
    }

    pub fn to_topology(&self) -> Result<DeviceTopology> {
        DeviceTopology::new(self.name.clone(), self.n_qubits, self.edges.iter().map(|&[a, b]| (a, b)))
            .map_err(|e| Error::invalid(format!("topology {:?}", self.name), e))
    }
}

/// Parse and validate a topology document.
pub fn parse_topology(text: &str, context: &str) -> Result<DeviceTopology> {
    let doc: TopologyDoc = serde_json::from_str(text).map_err(|e| Error::parse(context, e))?;
    doc.to_topology()
}

pub fn load_topology(path: &Path) -> Result<DeviceTopology> {
    parse_topology(&read_text(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub layers: Vec<Vec<[usize; 2]>>,
}

impl ScheduleDoc {
    pub fn from_schedule(s: &CzSchedule) -> Self {
        ScheduleDoc { layers: s.layers().iter().map(|l| l.iter().map(|e| [e.a, e.b]).collect()).collect() }
    }

    pub fn to_schedule(&self, topology: &DeviceTopology) -> Result<CzSchedule> {
        let layers = self.layers.iter().map(|l| l.iter().map(|&[a, b]| Edge::new(a, b)).collect()).collect();
        CzSchedule::from_layers(topology, layers).map_err(|e| Error::invalid("schedule", e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsDoc {
    pub setting: String,
    pub qubits: Vec<usize>,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl CountsDoc {
    pub fn from_table(t: &CountsTable) -> Self {
        CountsDoc {
            setting: t.setting().to_string(),
            qubits: t.qubits().to_vec(),
            shots: t.shots(),
            counts: t.counts().clone(),
        }
    }

    pub fn to_table(&self) -> Result<CountsTable> {
        let context = || format!("counts for setting {:?}", self.setting);
        let setting = BasisSetting::parse(&self.setting).map_err(|e| Error::invalid(context(), e))?;
        CountsTable::new(setting, self.qubits.clone(), self.shots, self.counts.clone())
            .map_err(|e| Error::invalid(context(), e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitCalibration {
    pub q: usize,
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub p11: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationDoc {
    pub snapshot: String,
    pub qubits: Vec<QubitCalibration>,
}

impl CalibrationDoc {
    pub fn from_snapshot(s: &CalibrationSnapshot) -> Self {
        let qubits = s
            .qubits()
            .iter()
            .zip(s.matrices())
            .map(|(&q, m)| QubitCalibration { q, p00: m.p00(), p10: m.p10(), p01: m.p01(), p11: m.p11() })
            .collect();
        CalibrationDoc { snapshot: s.label().to_string(), qubits }
    }

    pub fn to_snapshot(&self) -> Result<CalibrationSnapshot> {
        let context = || format!("calibration snapshot {:?}", self.snapshot);
        let entries = self
            .qubits
            .iter()
            .map(|c| {
                CalibrationMatrix::new(c.p00, c.p10, c.p01, c.p11)
                    .map(|m| (c.q, m))
                    .map_err(|e| Error::invalid(format!("{} qubit {}", context(), c.q), e))
            })
            .collect::<Result<Vec<_>>>()?;
        CalibrationSnapshot::new(self.snapshot.clone(), entries).map_err(|e| Error::invalid(context(), e))
    }
}

/// Per-qubit readout flip probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutDoc {
    pub qubits: Vec<QubitReadout>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitReadout {
    pub q: usize,
    pub p1_given0: f64,
    pub p0_given1: f64,
}

impl ReadoutDoc {
    pub fn from_errors(errors: &[ReadoutError]) -> Self {
        let qubits = errors
            .iter()
            .enumerate()
            .map(|(q, r)| QubitReadout { q, p1_given0: r.p1_given0(), p0_given1: r.p0_given1() })
            .collect();
        ReadoutDoc { qubits }
    }

    /// Readout errors of qubits `0..n_qubits`; every qubit must appear once.
    pub fn to_errors(&self, n_qubits: usize) -> Result<Vec<ReadoutError>> {
        let mut errors = vec![None; n_qubits];
        for r in &self.qubits {
            let context = format!("readout of qubit {}", r.q);
            let slot =
                errors.get_mut(r.q).ok_or_else(|| Error::invalid(&context, format!("device has {n_qubits} qubits")))?;
            if slot.is_some() {
                return Err(Error::invalid(context, "listed twice"));
            }
            *slot = Some(ReadoutError::new(r.p1_given0, r.p0_given1).map_err(|e| Error::invalid(&context, e))?);
        }
        errors
            .into_iter()
            .enumerate()
            .map(|(q, r)| r.ok_or_else(|| Error::invalid(format!("readout of qubit {q}"), "missing")))
            .collect()
    }
}

/// Complex matrix as separate real and imaginary arrays, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub qubits: Vec<usize>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl MatrixDoc {
    pub fn from_matrix(qubits: Vec<usize>, m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
        };
        MatrixDoc { qubits, real: rows(|z| z.re), imag: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let dim = 1usize << self.qubits.len();
        let square = |a: &Vec<Vec<f64>>| a.len() == dim && a.iter().all(|r| r.len() == dim);
        if !square(&self.real) || !square(&self.imag) {
            return Err(Error::invalid(
                "matrix",
                format!("expected {dim}x{dim} arrays for {} qubits", self.qubits.len()),
            ));
        }
        Ok(CMatrix::from_fn(dim, dim, |r, c| Complex64::new(self.real[r][c], self.imag[r][c])))
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path.display().to_string(), e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

/// Write `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value))
}
