//! The experiment: simulate the native-graph state, run local tomography
//! and calibration circuits, then certify every edge with and without
//! readout correction.
//!
//! Every random draw comes from a stream of the master seed labelled by
//! phase and by the edge endpoints, never by evaluation order, so edges run
//! in parallel and the output is identical for any thread count.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use hexent_core::analysis::{projected_pair_state, AnalysisError};
use hexent_core::certify::certify_pair;
use hexent_core::counts::CountsTable;
use hexent_core::density::{CMatrix, DensityMatrix};
use hexent_core::noise::{drift_readout, NoiseModel, ReadoutError};
use hexent_core::qrem::{build_calibration_matrices, CalibrationSnapshot};
use hexent_core::rng::{domain, stream, stream_seed};
use hexent_core::sampling::{run_calibration_circuits, LocalSampler};
use hexent_core::stabilizer::StabilizerState;
use hexent_core::stats::PairCalibration;
use hexent_core::tomography::{reconstruct, tomography_settings, TomographyDataset};
use hexent_core::topology::{schedule_cz_layers, CzSchedule, DeviceTopology, Edge};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::report::{summarize, Analysis, EdgeRecord, ExperimentReport, Provenance};

/// One calibration run: the readout errors in force, the counts of the
/// all-zeros and all-ones preparations, and the matrices built from them.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRun {
    pub snapshot: CalibrationSnapshot,
    pub readout: Vec<ReadoutError>,
    /// Device-wide counts; kept when the run is bootstrapped from its
    /// counts (a single snapshot).
    pub counts: Option<(CountsTable, CountsTable)>,
}

/// Everything measured: the tomography data of every edge and the
/// calibration runs.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub topology: DeviceTopology,
    pub schedule: CzSchedule,
    pub noise: NoiseModel,
    pub calibrations: Vec<CalibrationRun>,
    /// One dataset per topology edge, in edge order. Each dataset's qubits
    /// are the pair followed by its neighbors.
    pub datasets: Vec<(Edge, TomographyDataset)>,
}

/// Reconstructed states of one edge under one analysis.
#[derive(Clone, Debug)]
pub struct EdgeMatrices {
    pub edge: Edge,
    pub qrem: bool,
    pub density: DensityMatrix,
    /// Pair state after the best neighbor projection.
    pub best_pair: Option<CMatrix>,
}

/// Output of [`run_pipeline`].
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub simulation: Simulation,
    pub report: ExperimentReport,
    pub matrices: Vec<EdgeMatrices>,
}

fn edge_path(phase: u64, edge: Edge) -> [u64; 3] {
    [phase, edge.a as u64, edge.b as u64]
}

fn calibration_run(
    config: &ExperimentConfig,
    base: &[ReadoutError],
    index: usize,
    snapshots: usize,
) -> Result<CalibrationRun> {
    let context = || format!("calibration run {index}");
    let readout = if config.calibration.drift > 0.0 {
        let mut rng = stream(config.seed, &[domain::NOISE_PROFILE, index as u64 + 1]);
        drift_readout(base, config.calibration.drift, &mut rng).map_err(|e| Error::invalid(context(), e))?
    } else {
        base.to_vec()
    };
    let noise = NoiseModel::new(readout.clone(), 0.0, 0.0).map_err(|e| Error::invalid(context(), e))?;
    let n = base.len();
    let prepared = |bit: bool| {
        let mut rng = stream(config.seed, &[domain::CALIBRATION, index as u64, bit as u64]);
        run_calibration_circuits(&vec![bit; n], config.calibration_shots, &noise, &mut rng)
            .map_err(|e| Error::runtime(context(), e))
    };
    let (zero, one) = (prepared(false)?, prepared(true)?);
    let matrices = build_calibration_matrices(&zero, &one).map_err(|e| Error::runtime(context(), e))?;
    let label = format!("snapshot-{index:03}");
    let snapshot = CalibrationSnapshot::new(label, matrices.into_iter().enumerate().collect())
        .map_err(|e| Error::runtime(context(), e))?;
    let counts = (snapshots == 1).then_some((zero, one));
    Ok(CalibrationRun { snapshot, readout, counts })
}

fn edge_dataset(
    config: &ExperimentConfig,
    sim: (&DeviceTopology, &CzSchedule, &StabilizerState, &NoiseModel),
    edge: Edge,
) -> Result<TomographyDataset> {
    let (topology, schedule, ideal, noise) = sim;
    let qubits = topology.pair_neighborhood(edge);
    let sampler = LocalSampler::new(topology, schedule, ideal, &qubits).map_err(|e| Error::edge(edge, e))?;
    let settings = tomography_settings(qubits.len()).map_err(|e| Error::edge(edge, e))?;
    let path = edge_path(domain::TOMOGRAPHY, edge);
    let tables = settings
        .iter()
        .enumerate()
        .map(|(i, setting)| {
            let mut rng = stream(config.seed, &[path[0], path[1], path[2], i as u64]);
            sampler.sample(setting, config.shots, noise, &mut rng).map_err(|e| Error::edge(edge, e))
        })
        .collect::<Result<Vec<_>>>()?;
    TomographyDataset::new(qubits, tables).map_err(|e| Error::edge(edge, e))
}

/// Prepare the state, measure every edge neighborhood in all local Pauli
/// settings and run the calibration circuits.
pub fn simulate(config: &ExperimentConfig) -> Result<Simulation> {
    config.validate()?;
    let topology = config.build_topology()?;
    let schedule = schedule_cz_layers(&topology);
    let noise = config.noise_model(topology.n_qubits())?;
    let ideal = StabilizerState::graph_state(&topology);

    let snapshots = config.calibration.snapshots;
    let calibrations = (0..snapshots)
        .into_par_iter()
        .map(|i| calibration_run(config, noise.readout_errors(), i, snapshots))
        .collect::<Result<Vec<_>>>()?;

    let datasets = topology
        .edges()
        .par_iter()
        .map(|&edge| Ok((edge, edge_dataset(config, (&topology, &schedule, &ideal, &noise), edge)?)))
        .collect::<Result<Vec<_>>>()?;

    Ok(Simulation { topology, schedule, noise, calibrations, datasets })
}

/// Calibration data restricted to `qubits`, for the corrected analysis.
pub fn pair_calibration(calibrations: &[CalibrationRun], qubits: &[usize]) -> Result<PairCalibration> {
    let context = || format!("calibration for qubits {qubits:?}");
    match calibrations {
        [] => Err(Error::invalid(context(), "no calibration runs")),
        [run] => {
            let (zero, one) = run
                .counts
                .as_ref()
                .ok_or_else(|| Error::invalid(context(), "a single calibration run needs its counts"))?;
            PairCalibration::single_snapshot(zero, one, qubits).map_err(|e| Error::invalid(context(), e))
        }
        runs => runs
            .iter()
            .map(|r| r.snapshot.select(qubits).map_err(|e| Error::invalid(context(), e)))
            .collect::<Result<Vec<_>>>()
            .map(PairCalibration::MultiSnapshot),
    }
}

/// Point-estimate state of a dataset, corrected when `calibration` is not
/// [`PairCalibration::Uncorrected`].
pub fn reconstruct_edge(
    edge: Edge,
    dataset: &TomographyDataset,
    calibration: &PairCalibration,
) -> Result<DensityMatrix> {
    let probabilities =
        calibration.correct(dataset.qubits(), &dataset.probabilities()).map_err(|e| Error::edge(edge, e))?;
    reconstruct(dataset.qubits(), &probabilities).map_err(|e| Error::edge(edge, e))
}

fn analyze_edge(
    config: &ExperimentConfig,
    calibrations: &[CalibrationRun],
    edge: Edge,
    dataset: &TomographyDataset,
    qrem: bool,
) -> Result<(EdgeRecord, EdgeMatrices)> {
    let calibration =
        if qrem { pair_calibration(calibrations, dataset.qubits())? } else { PairCalibration::Uncorrected };
    let bootstrap = config.bootstrap_config()?.with_seed(stream_seed(config.seed, &edge_path(domain::BOOTSTRAP, edge)));
    let cert = certify_pair(edge, dataset, &calibration, &bootstrap).map_err(|e| Error::edge(edge, e))?;
    let density = reconstruct_edge(edge, dataset, &calibration)?;
    let best_pair = match &cert.estimate.best {
        Some(outcome) => {
            projected_pair_state(density.matrix(), outcome).map_err(|e: AnalysisError| Error::edge(edge, e))?
        }
        None => None,
    };
    let record = EdgeRecord::new(qrem, dataset.qubits(), &cert);
    Ok((record, EdgeMatrices { edge, qrem, density, best_pair }))
}

/// Certify every edge of a simulation for each requested analysis.
pub fn analyze(config: &ExperimentConfig, sim: &Simulation) -> Result<(Vec<Analysis>, Vec<EdgeMatrices>)> {
    let mut analyses = Vec::new();
    let mut matrices = Vec::new();
    for qrem in config.qrem.analyses() {
        let results = sim
            .datasets
            .par_iter()
            .map(|(edge, dataset)| analyze_edge(config, &sim.calibrations, *edge, dataset, qrem))
            .collect::<Result<Vec<_>>>()?;
        let (records, edge_matrices): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        let (summary, components) = summarize(&records, &sim.topology)?;
        analyses.push(Analysis { qrem, records, summary, components });
        matrices.extend(edge_matrices);
    }
    Ok((analyses, matrices))
}

/// Certify a simulation and assemble the report. Provenance times count
/// from `started`.
pub fn report_simulation(
    config: &ExperimentConfig,
    sim: &Simulation,
    started: (SystemTime, Instant),
) -> Result<(ExperimentReport, Vec<EdgeMatrices>)> {
    let (analyses, matrices) = analyze(config, sim)?;
    let readout = sim.noise.readout_errors();
    let provenance = Provenance {
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started.0.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        elapsed_seconds: started.1.elapsed().as_secs_f64(),
        mean_readout_rate: readout.iter().map(ReadoutError::rate).sum::<f64>() / readout.len() as f64,
    };
    let report = ExperimentReport::new(&sim.topology, &sim.schedule, analyses, config.clone(), provenance);
    Ok((report, matrices))
}

/// The full experiment described by `config`.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<PipelineRun> {
    let started = (SystemTime::now(), Instant::now());
    let simulation = simulate(config)?;
    let (report, matrices) = report_simulation(config, &simulation, started)?;
    Ok(PipelineRun { simulation, report, matrices })
}
