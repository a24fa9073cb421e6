use hexent::config::{ExperimentConfig, TopologySource};
use hexent::formats::{
    parse_topology, read_json, to_json, write_json, CalibrationDoc, CountsDoc, MatrixDoc, ReadoutDoc, ScheduleDoc,
    TopologyDoc,
};
use hexent::presets::{manhattan, rochester, topology_preset};
use hexent_core::counts::{BasisSetting, CountsTable};
use hexent_core::density::CMatrix;
use hexent_core::noise::ReadoutError;
use hexent_core::qrem::{CalibrationMatrix, CalibrationSnapshot};
use hexent_core::topology::schedule_cz_layers;
use num_complex::Complex64;

fn round_trip<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> T {
    serde_json::from_str(&to_json(value)).unwrap()
}

#[test]
fn topology_and_schedule_round_trip() {
    for t in [rochester(), manhattan()] {
        let doc = TopologyDoc::from_topology(&t);
        assert_eq!(round_trip(&doc).to_topology().unwrap(), t);
        let s = schedule_cz_layers(&t);
        assert_eq!(round_trip(&ScheduleDoc::from_schedule(&s)).to_schedule(&t).unwrap(), s);
    }
}

#[test]
fn topology_files_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/device.json");
    write_json(&path, &TopologyDoc::from_topology(&rochester())).unwrap();
    let config = ExperimentConfig::new(TopologySource::File(path));
    assert_eq!(config.build_topology().unwrap(), rochester());
    assert_eq!(topology_preset("rochester").unwrap(), rochester());
}

#[test]
fn invalid_topologies_are_rejected_with_a_reason() {
    let cases = [
        (r#"{"name":"t","n_qubits":2,"edges":[[0,0]]}"#, "0"),
        (r#"{"name":"t","n_qubits":2,"edges":[[0,5]]}"#, "5"),
        (r#"{"name":"t","n_qubits":3,"edges":[[0,1]]}"#, ""),
        (r#"{"name":"t","n_qubits":2,"edges":[[0,1]],"extra":1}"#, "extra"),
    ];
    for (text, needle) in cases {
        let err = parse_topology(text, "input").unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains(needle), "{err}");
    }
}

#[test]
fn counts_round_trip() {
    let setting = BasisSetting::parse("XYZ").unwrap();
    let dense: Vec<u64> = (0..8).map(|i| i * 3 + 1).collect();
    let table = CountsTable::from_dense(setting, vec![4, 2, 9], &dense).unwrap();
    let doc = CountsDoc::from_table(&table);
    assert_eq!(round_trip(&doc).to_table().unwrap(), table);
}

#[test]
fn calibration_and_readout_round_trip() {
    let snapshot = CalibrationSnapshot::new(
        "snapshot-000",
        vec![
            (0, CalibrationMatrix::from_flips(0.1, 0.2).unwrap()),
            (3, CalibrationMatrix::from_flips(0.0, 0.05).unwrap()),
        ],
    )
    .unwrap();
    assert_eq!(round_trip(&CalibrationDoc::from_snapshot(&snapshot)).to_snapshot().unwrap(), snapshot);

    let errors: Vec<ReadoutError> =
        (0..5).map(|i| ReadoutError::new(0.01 * i as f64, 0.3 - 0.02 * i as f64).unwrap()).collect();
    assert_eq!(round_trip(&ReadoutDoc::from_errors(&errors)).to_errors(5).unwrap(), errors);
    assert!(ReadoutDoc::from_errors(&errors).to_errors(6).is_err());
}

#[test]
fn matrices_round_trip_bit_exactly() {
    let m = CMatrix::from_fn(4, 4, |r, c| Complex64::new(1.0 / (r + c + 3) as f64, (r as f64 - c as f64) / 7.0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    write_json(&path, &MatrixDoc::from_matrix(vec![3, 8], &m)).unwrap();
    let back: MatrixDoc = read_json(&path).unwrap();
    assert_eq!(back.qubits, vec![3, 8]);
    assert_eq!(back.to_matrix().unwrap(), m);
}

#[test]
fn configuration_round_trips_through_toml() {
    let text = r#"
seed = 11
shots = 2000
qrem = "on"

[topology]
preset = "rochester"

[noise]
cz_depolarizing = 0.01

[noise.readout]
profile = "rochester"

[bootstrap]
replicates = 300
"#;
    let config = ExperimentConfig::from_toml(text, std::path::Path::new("."), "test").unwrap();
    assert_eq!(config.seed, 11);
    assert_eq!(config.bootstrap.replicates, 300);
    let again = ExperimentConfig::from_toml(&config.to_toml(), std::path::Path::new("."), "test").unwrap();
    assert_eq!(again, config);
    let errors = config.readout_errors(53).unwrap();
    assert_eq!(errors, again.readout_errors(53).unwrap());
}
