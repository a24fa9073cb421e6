//! On-disk layout of a run directory.
//!
//! ```text
//! topology.json  schedule.json  noise.json
//! counts/edge_A_B.json                  tomography counts, one entry per setting
//! calibration/snapshot-NNN.json         calibration matrices
//! calibration/snapshot-NNN.readout.json readout errors in force for the run
//! calibration/snapshot-NNN.zero.json    device-wide counts (single run only)
//! calibration/snapshot-NNN.one.json
//! matrices/qrem_{on,off}/edge_A_B.json  reconstructed neighborhood states
//! ```

use std::fs;
use std::path::Path;

use hexent_core::noise::NoiseModel;
use hexent_core::tomography::TomographyDataset;
use hexent_core::topology::Edge;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{
    read_json, write_json, CalibrationDoc, CountsDoc, MatrixDoc, ReadoutDoc, ScheduleDoc, TopologyDoc,
};
use crate::pipeline::{CalibrationRun, EdgeMatrices, Simulation};
use crate::report::qrem_label;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseDoc {
    pub readout: ReadoutDoc,
    pub cz_depolarizing: f64,
    pub single_qubit_depolarizing: f64,
}

pub fn edge_file(edge: Edge) -> String {
    format!("edge_{}_{}.json", edge.a, edge.b)
}

pub fn save_simulation(sim: &Simulation, dir: &Path) -> Result<()> {
    let mut topology = TopologyDoc::from_topology(&sim.topology);
    topology.source = Some("run".into());
    write_json(&dir.join("topology.json"), &topology)?;
    write_json(&dir.join("schedule.json"), &ScheduleDoc::from_schedule(&sim.schedule))?;
    let noise = NoiseDoc {
        readout: ReadoutDoc::from_errors(sim.noise.readout_errors()),
        cz_depolarizing: sim.noise.cz_depolarizing(),
        single_qubit_depolarizing: sim.noise.single_qubit_depolarizing(),
    };
    write_json(&dir.join("noise.json"), &noise)?;
    for (edge, dataset) in &sim.datasets {
        let docs: Vec<CountsDoc> = dataset.tables().iter().map(CountsDoc::from_table).collect();
        write_json(&dir.join("counts").join(edge_file(*edge)), &docs)?;
    }
    let cal = dir.join("calibration");
    for run in &sim.calibrations {
        let label = run.snapshot.label();
        write_json(&cal.join(format!("{label}.json")), &CalibrationDoc::from_snapshot(&run.snapshot))?;
        write_json(&cal.join(format!("{label}.readout.json")), &ReadoutDoc::from_errors(&run.readout))?;
        if let Some((zero, one)) = &run.counts {
            write_json(&cal.join(format!("{label}.zero.json")), &CountsDoc::from_table(zero))?;
            write_json(&cal.join(format!("{label}.one.json")), &CountsDoc::from_table(one))?;
        }
    }
    Ok(())
}

pub fn save_matrices(matrices: &[EdgeMatrices], dir: &Path) -> Result<()> {
    for m in matrices {
        let path = dir.join("matrices").join(qrem_label(m.qrem)).join(edge_file(m.edge));
        write_json(&path, &MatrixDoc::from_matrix(m.density.qubits().to_vec(), m.density.matrix()))?;
    }
    Ok(())
}

/// Read back a directory written by [`save_simulation`].
pub fn load_simulation(dir: &Path) -> Result<Simulation> {
    let topology = read_json::<TopologyDoc>(&dir.join("topology.json"))?.to_topology()?;
    let schedule = read_json::<ScheduleDoc>(&dir.join("schedule.json"))?.to_schedule(&topology)?;
    let noise_doc: NoiseDoc = read_json(&dir.join("noise.json"))?;
    let noise = NoiseModel::new(
        noise_doc.readout.to_errors(topology.n_qubits())?,
        noise_doc.cz_depolarizing,
        noise_doc.single_qubit_depolarizing,
    )
    .map_err(|e| Error::invalid("noise.json", e))?;

    let datasets = topology
        .edges()
        .iter()
        .map(|&edge| {
            let docs: Vec<CountsDoc> = read_json(&dir.join("counts").join(edge_file(edge)))?;
            let tables = docs.iter().map(CountsDoc::to_table).collect::<Result<Vec<_>>>()?;
            let qubits = tables.first().map(|t| t.qubits().to_vec()).unwrap_or_default();
            let dataset = TomographyDataset::new(qubits, tables).map_err(|e| Error::edge(edge, e))?;
            Ok((edge, dataset))
        })
        .collect::<Result<Vec<_>>>()?;

    let cal = dir.join("calibration");
    let mut labels: Vec<String> = fs::read_dir(&cal)
        .map_err(|e| Error::io(&cal, e))?
        .filter_map(|entry| entry.ok()?.file_name().into_string().ok())
        .filter_map(|name| name.strip_suffix(".json").filter(|stem| !stem.contains('.')).map(String::from))
        .collect();
    labels.sort();
    let calibrations = labels
        .iter()
        .map(|label| {
            let snapshot = read_json::<CalibrationDoc>(&cal.join(format!("{label}.json")))?.to_snapshot()?;
            let readout =
                read_json::<ReadoutDoc>(&cal.join(format!("{label}.readout.json")))?.to_errors(topology.n_qubits())?;
            let (zero, one) = (cal.join(format!("{label}.zero.json")), cal.join(format!("{label}.one.json")));
            let counts = if zero.is_file() && one.is_file() {
                Some((read_json::<CountsDoc>(&zero)?.to_table()?, read_json::<CountsDoc>(&one)?.to_table()?))
            } else {
                None
            };
            Ok(CalibrationRun { snapshot, readout, counts })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Simulation { topology, schedule, noise, calibrations, datasets })
}
