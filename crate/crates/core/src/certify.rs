//! Per-edge certification: readout correction, local tomography,
//! projected negativity and its bootstrap interval.

use alloc::vec::Vec;

use crate::analysis::{max_projected_negativity, AnalysisError, PairResult, ProjectedNegativity};
use crate::qrem::QremError;
use crate::stats::{bootstrap_negativity, BootstrapConfig, BootstrapResult, PairCalibration, StatsError};
use crate::tomography::{reconstruct, TomographyDataset, TomographyError};
use crate::topology::Edge;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Tomography(#[from] TomographyError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Qrem(#[from] QremError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("dataset for edge {0} does not start with the pair")]
    PairOrder(Edge),
}

/// Reconstruct the state from per-setting probabilities and maximize the
/// pair negativity over neighbor projections.
pub fn estimate_pair(qubits: &[usize], probabilities: &[Vec<f64>]) -> Result<ProjectedNegativity, CertifyError> {
    let rho = reconstruct(qubits, probabilities)?;
    Ok(max_projected_negativity(rho.matrix())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCertificate {
    pub result: PairResult,
    pub estimate: ProjectedNegativity,
    pub bootstrap: BootstrapResult,
}

pub fn certify_pair(
    edge: Edge,
    dataset: &TomographyDataset,
    calibration: &PairCalibration,
    config: &BootstrapConfig,
) -> Result<PairCertificate, CertifyError> {
    let qubits = dataset.qubits();
    let pair = [qubits.first().copied(), qubits.get(1).copied()];
    if pair != [Some(edge.a), Some(edge.b)] && pair != [Some(edge.b), Some(edge.a)] {
        return Err(CertifyError::PairOrder(edge));
    }
    let measured = dataset.probabilities();
    let point: Vec<Vec<f64>> = calibration.correct(qubits, &measured)?;
    let estimate = estimate_pair(qubits, &point)?;
    let bootstrap = bootstrap_negativity(qubits, &measured, dataset.shots(), calibration, config, |p| {
        estimate_pair(qubits, p).map(|e| e.value)
    })?;
    let result = PairResult::new(edge, &estimate, bootstrap.lower, bootstrap.upper);
    Ok(PairCertificate { result, estimate, bootstrap })
}
