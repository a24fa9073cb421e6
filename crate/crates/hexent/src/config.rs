//! Experiment configuration, read from a TOML document.
//!
//! ```toml
//! seed = 7
//! shots = 4000
//! calibration_shots = 8192
//! qrem = "both"
//! out = "runs/rochester"
//!
//! [topology]
//! preset = "rochester"
//!
//! [noise]
//! readout = { profile = "rochester" }
//! cz_depolarizing = 0.0
//!
//! [bootstrap]
//! replicates = 1000
//! level = 0.95
//! ```
//!
//! Relative paths are resolved against the directory of the configuration
//! file.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use hexent_core::noise::{sample_readout_rates, NoiseModel, ReadoutError};
use hexent_core::rng::{domain, stream};
use hexent_core::stats::{BootstrapConfig, DEFAULT_LEVEL, DEFAULT_REPLICATES, MIN_REPLICATES};
use hexent_core::topology::{generate_heavy_hex, DeviceTopology};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{load_topology, read_json, ReadoutDoc};
use crate::presets::{readout_profile, topology_preset};

pub const DEFAULT_SHOTS: u64 = 4000;
pub const DEFAULT_CALIBRATION_SHOTS: u64 = 8192;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologySource {
    Preset(String),
    File(PathBuf),
    HeavyHex { rows: usize, cols: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutSource {
    /// The same symmetric rate on every qubit.
    Rate(f64),
    /// Symmetric per-qubit rates from a truncated normal.
    Sampled { mean: f64, stddev: f64 },
    /// Sampled with a shipped device profile.
    Profile(String),
    /// Per-qubit rates from a readout document.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default = "no_readout")]
    pub readout: ReadoutSource,
    /// Two-qubit depolarizing probability after every CZ.
    #[serde(default)]
    pub cz_depolarizing: f64,
    /// Single-qubit depolarizing probability after every H and basis
    /// rotation.
    #[serde(default)]
    pub single_qubit_depolarizing: f64,
}

fn no_readout() -> ReadoutSource {
    ReadoutSource::Rate(0.0)
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { readout: no_readout(), cz_depolarizing: 0.0, single_qubit_depolarizing: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum QremMode {
    On,
    Off,
    Both,
}

impl QremMode {
    /// Analyses to run, uncorrected first.
    pub fn analyses(self) -> Vec<bool> {
        match self {
            QremMode::On => vec![true],
            QremMode::Off => vec![false],
            QremMode::Both => vec![false, true],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Number of calibration runs. One run is bootstrapped from its counts;
    /// several are drawn whole per replicate.
    #[serde(default = "one")]
    pub snapshots: usize,
    /// Standard deviation of the per-run, per-qubit shift of the readout
    /// rates, modelling drift between calibration runs.
    #[serde(default)]
    pub drift: f64,
}

fn one() -> usize {
    1
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig { snapshots: 1, drift: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSettings {
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

impl Default for BootstrapSettings {
    fn default() -> Self {
        BootstrapSettings { replicates: DEFAULT_REPLICATES, level: DEFAULT_LEVEL }
    }
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

fn default_calibration_shots() -> u64 {
    DEFAULT_CALIBRATION_SHOTS
}

fn default_qrem() -> QremMode {
    QremMode::Both
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySource,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_calibration_shots")]
    pub calibration_shots: u64,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default = "default_qrem")]
    pub qrem: QremMode,
    #[serde(default)]
    pub bootstrap: BootstrapSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for everything but the topology.
    pub fn new(topology: TopologySource) -> Self {
        ExperimentConfig {
            topology,
            noise: NoiseConfig::default(),
            shots: DEFAULT_SHOTS,
            calibration_shots: DEFAULT_CALIBRATION_SHOTS,
            calibration: CalibrationConfig::default(),
            qrem: QremMode::Both,
            bootstrap: BootstrapSettings::default(),
            out: None,
            seed: 0,
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_toml(text: &str, base_dir: &Path, context: &str) -> Result<Self> {
        let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::parse(context, e))?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(path.display().to_string(), e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        ExperimentConfig::from_toml(&text, &base, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.out.as_deref().map(|p| self.resolve(p))
    }

    /// Check ranges and that referenced files exist.
    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, message: String| Err(Error::invalid(format!("config field {field}"), message));
        if self.shots == 0 {
            return invalid("shots", "must be at least 1".into());
        }
        if self.calibration_shots == 0 {
            return invalid("calibration_shots", "must be at least 1".into());
        }
        if self.calibration.snapshots == 0 {
            return invalid("calibration.snapshots", "must be at least 1".into());
        }
        if !(self.calibration.drift >= 0.0 && self.calibration.drift.is_finite()) {
            return invalid("calibration.drift", format!("{} is not a standard deviation", self.calibration.drift));
        }
        for (field, p) in [
            ("noise.cz_depolarizing", self.noise.cz_depolarizing),
            ("noise.single_qubit_depolarizing", self.noise.single_qubit_depolarizing),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(field, format!("{p} is not a probability"));
            }
        }
        self.bootstrap_config()?;
        match &self.topology {
            TopologySource::File(p) => self.require_file("topology.file", p)?,
            TopologySource::HeavyHex { rows, cols } if *rows == 0 || *cols == 0 => {
                return invalid("topology.heavy_hex", "rows and cols must be at least 1".into());
            }
            TopologySource::Preset(name) => {
                topology_preset(name)?;
            }
            _ => {}
        }
        match &self.noise.readout {
            ReadoutSource::File(p) => self.require_file("noise.readout.file", p)?,
            ReadoutSource::Profile(name) => {
                readout_profile(name)?;
            }
            ReadoutSource::Rate(r) => {
                ReadoutError::symmetric(*r).map_err(|e| Error::invalid("config field noise.readout.rate", e))?;
            }
            ReadoutSource::Sampled { .. } => {}
        }
        Ok(())
    }

    fn require_file(&self, field: &str, path: &Path) -> Result<()> {
        let full = self.resolve(path);
        if full.is_file() {
            Ok(())
        } else {
            Err(Error::invalid(format!("config field {field}"), format!("{} does not exist", full.display())))
        }
    }

    pub fn bootstrap_config(&self) -> Result<BootstrapConfig> {
        BootstrapConfig::new(self.bootstrap.replicates, self.bootstrap.level, self.seed).map_err(|e| {
            Error::invalid(
                "config section bootstrap",
                format!("{e} (replicates must be at least {MIN_REPLICATES}, level in (0, 1))"),
            )
        })
    }

    pub fn build_topology(&self) -> Result<DeviceTopology> {
        match &self.topology {
            TopologySource::Preset(name) => topology_preset(name),
            TopologySource::File(p) => load_topology(&self.resolve(p)),
            TopologySource::HeavyHex { rows, cols } => {
                let nz = |v: usize| {
                    NonZeroUsize::new(v).ok_or_else(|| {
                        Error::invalid("config field topology.heavy_hex", "rows and cols must be at least 1")
                    })
                };
                Ok(generate_heavy_hex(nz(*rows)?, nz(*cols)?))
            }
        }
    }

    /// Per-qubit readout errors; sampled rates come from the noise-profile
    /// stream of the master seed.
    pub fn readout_errors(&self, n_qubits: usize) -> Result<Vec<ReadoutError>> {
        let context = "config section noise.readout";
        let sampled = |mean: f64, stddev: f64| {
            let mut rng = stream(self.seed, &[domain::NOISE_PROFILE]);
            sample_readout_rates(n_qubits, mean, stddev, &mut rng).map_err(|e| Error::invalid(context, e))
        };
        match &self.noise.readout {
            ReadoutSource::Rate(r) => {
                Ok(vec![ReadoutError::symmetric(*r).map_err(|e| Error::invalid(context, e))?; n_qubits])
            }
            ReadoutSource::Sampled { mean, stddev } => sampled(*mean, *stddev),
            ReadoutSource::Profile(name) => {
                let p = readout_profile(name)?;
                sampled(p.mean, p.stddev)
            }
            ReadoutSource::File(p) => read_json::<ReadoutDoc>(&self.resolve(p))?.to_errors(n_qubits),
        }
    }

    pub fn noise_model(&self, n_qubits: usize) -> Result<NoiseModel> {
        NoiseModel::new(
            self.readout_errors(n_qubits)?,
            self.noise.cz_depolarizing,
            self.noise.single_qubit_depolarizing,
        )
        .map_err(|e| Error::invalid("config section noise", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_takes_defaults() {
        let c = ExperimentConfig::from_toml("[topology]\npreset = \"rochester\"\n", Path::new("."), "t").unwrap();
        assert_eq!(c, ExperimentConfig::new(TopologySource::Preset("rochester".into())));
        c.validate().unwrap();
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"
seed = 7
shots = 100
calibration_shots = 200
qrem = "on"
out = "runs/x"

[topology.heavy_hex]
rows = 1
cols = 2

[noise]
readout = { sampled = { mean = 0.05, stddev = 0.01 } }
cz_depolarizing = 0.01

[calibration]
snapshots = 3
drift = 0.005

[bootstrap]
replicates = 200
level = 0.9
"#;
        let c = ExperimentConfig::from_toml(text, Path::new("."), "t").unwrap();
        c.validate().unwrap();
        assert_eq!(c.topology, TopologySource::HeavyHex { rows: 1, cols: 2 });
        assert_eq!(c.noise.readout, ReadoutSource::Sampled { mean: 0.05, stddev: 0.01 });
        assert_eq!(c.calibration.snapshots, 3);
        let again = ExperimentConfig::from_toml(&c.to_toml(), Path::new("."), "t").unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let base = "[topology]\npreset = \"manhattan\"\n";
        for extra in [
            "shots = 0\n",
            "[bootstrap]\nreplicates = 10\n",
            "[noise]\ncz_depolarizing = 1.5\n",
            "[noise]\nreadout = { file = \"missing.json\" }\n",
            "[calibration]\nsnapshots = 0\n",
        ] {
            let text = if extra.starts_with('[') { format!("{base}{extra}") } else { format!("{extra}{base}") };
            let c = ExperimentConfig::from_toml(&text, Path::new("/nonexistent"), "t").unwrap();
            let err = c.validate().unwrap_err();
            assert_eq!(err.exit_code(), 1, "{extra}: {err}");
        }
        let err = ExperimentConfig::from_toml("[topology]\npreset = 3\n", Path::new("."), "t").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err =
            ExperimentConfig::from_toml("[topology]\npreset = \"x\"\nbogus = 1\n", Path::new("."), "t").unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn sampled_rates_depend_only_on_the_seed() {
        let mut c = ExperimentConfig::new(TopologySource::Preset("rochester".into()));
        c.noise.readout = ReadoutSource::Profile("rochester".into());
        let a = c.readout_errors(53).unwrap();
        assert_eq!(a, c.readout_errors(53).unwrap());
        c.seed = 1;
        assert_ne!(a, c.readout_errors(53).unwrap());
    }
}
