mod common;

use common::*;
use hexent_core::counts::BasisSetting;
use hexent_core::density::{expectation, hermitian_eigen, CMatrix};
use hexent_core::noise::NoiseModel;
use hexent_core::pauli::LocalPauli;
use hexent_core::qrem::project_to_simplex;
use hexent_core::rng::stream;
use hexent_core::sampling::LocalSampler;
use hexent_core::stabilizer::{reduced_density_matrix, StabilizerState};
use hexent_core::tomography::{
    estimate_pauli_expectations, linear_inversion, nearest_physical_density_matrix, tomography_settings,
    PauliExpectations, TomographyDataset, TomographyError,
};
use hexent_core::topology::{schedule_cz_layers, DeviceTopology, Edge};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn dataset(t: &DeviceTopology, qubits: &[usize], shots: u64, seed: u64) -> TomographyDataset {
    let s = schedule_cz_layers(t);
    let ideal = StabilizerState::graph_state(t);
    let sampler = LocalSampler::new(t, &s, &ideal, qubits).unwrap();
    let noise = NoiseModel::noiseless(t.n_qubits());
    let mut rng = stream(seed, &[]);
    let tables = tomography_settings(qubits.len())
        .unwrap()
        .iter()
        .map(|setting| sampler.sample(setting, shots, &noise, &mut rng).unwrap())
        .collect();
    TomographyDataset::new(qubits.to_vec(), tables).unwrap()
}

#[test]
fn pair_expectations_follow_stabilizers() {
    let t = DeviceTopology::new("pair", 2, [(0, 1)]).unwrap();
    let e = estimate_pauli_expectations(&dataset(&t, &[0, 1], 4000, 40));
    let get = |s: &str| e.get(&LocalPauli::parse(s).unwrap());
    assert_eq!(get("II"), 1.0);
    assert_eq!(get("XZ"), 1.0);
    assert_eq!(get("ZX"), 1.0);
    assert_eq!(get("YY"), 1.0);
    // Non-stabilizer Paulis average to zero: 4000 shots, σ ≈ 0.016.
    assert!(get("ZZ").abs() < 0.08 && get("XI").abs() < 0.06);
}

#[test]
fn missing_setting_is_reported() {
    let t = DeviceTopology::new("pair", 2, [(0, 1)]).unwrap();
    let full = dataset(&t, &[0, 1], 100, 41);
    let partial: Vec<_> = full.tables().iter().filter(|t| t.setting().to_string() != "YX").cloned().collect();
    assert_eq!(TomographyDataset::new(vec![0, 1], partial), Err(TomographyError::MissingSetting("YX".into())));
}

#[test]
fn finite_shot_inversion_needs_projection() {
    let t = DeviceTopology::new("pair", 2, [(0, 1)]).unwrap();
    let raw = linear_inversion(&estimate_pauli_expectations(&dataset(&t, &[0, 1], 4000, 42)));
    let (values, _) = hermitian_eigen(&raw);
    assert!(values[0] < 0.0, "expected a negative eigenvalue, spectrum {values:?}");
    let rho = nearest_physical_density_matrix(&raw, vec![0, 1]).unwrap();
    assert!(rho.eigenvalues()[0] >= -1e-10);
}

#[test]
fn five_qubit_reconstruction_converges() {
    let t = DeviceTopology::unit_cell();
    let qubits = t.pair_neighborhood(Edge::new(2, 3));
    let exact = reduced_density_matrix(&StabilizerState::graph_state(&t), &qubits).unwrap();
    let data = dataset(&t, &qubits, 100_000, 43);
    let raw = linear_inversion(&estimate_pauli_expectations(&data));
    let rho = nearest_physical_density_matrix(&raw, qubits.clone()).unwrap();
    let err = frobenius(rho.matrix(), exact.matrix());
    assert!(err < 0.02, "Frobenius error {err}");
}

fn spectrum_projection_matches(h: &CMatrix) {
    let rho = nearest_physical_density_matrix(h, (0..h.nrows().trailing_zeros() as usize).collect()).unwrap();
    let (values, _) = hermitian_eigen(h);
    let mut expected = project_to_simplex(&values);
    expected.sort_by(f64::total_cmp);
    let got = rho.eigenvalues();
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12, "{got:?} vs {expected:?}");
    }
}

#[test]
fn diagonal_inputs_project_their_spectrum() {
    let mut rng = stream(44, &[]);
    for _ in 0..200 {
        let dim = 1 << rng.random_range(1..=5);
        let mut diag: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.3..0.6)).collect();
        let shift = (diag.iter().sum::<f64>() - 1.0) / dim as f64;
        diag.iter_mut().for_each(|d| *d -= shift);
        let h = CMatrix::from_diagonal(&DVector::from_iterator(dim, diag.iter().map(|&d| c(d, 0.0))));
        let rho = nearest_physical_density_matrix(&h, (0..dim.trailing_zeros() as usize).collect()).unwrap();
        for (i, p) in project_to_simplex(&diag).iter().enumerate() {
            assert!((rho.matrix()[(i, i)].re - p).abs() < 1e-12);
        }
    }
}

#[test]
fn projection_beats_random_physical_candidates() {
    let mut rng = stream(45, &[]);
    for trial in 0..20 {
        let dim = 1 << (1 + trial % 5);
        let h = random_hermitian_unit_trace(dim, &mut rng);
        spectrum_projection_matches(&h);
        let rho = nearest_physical_density_matrix(&h, (0..dim.trailing_zeros() as usize).collect()).unwrap();
        assert!(rho.is_positive_semidefinite());
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let best = frobenius(rho.matrix(), &h);
        for _ in 0..1000 {
            let rank = rng.random_range(1..=dim);
            let candidate = random_density(dim, rank, &mut rng);
            assert!(best <= frobenius(&candidate, &h) + 1e-12);
        }
        // Nearby physical candidates: mix the answer with random states.
        for _ in 0..200 {
            let w = rng.random_range(0.0..0.05);
            let candidate = rho.matrix().scale(1.0 - w) + random_density(dim, 1, &mut rng).scale(w);
            assert!(best <= frobenius(&candidate, &h) + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inversion_reproduces_expectations(k in 1usize..=4, seed in any::<u64>()) {
        let mut rng = stream(seed, &[]);
        let mut values: Vec<f64> = (0..1 << (2 * k)).map(|_| rng.random_range(-1.0..1.0)).collect();
        values[0] = 1.0;
        let e = PauliExpectations::new(k, values).unwrap();
        let rho = linear_inversion(&e);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        for i in 0..e.values().len() {
            prop_assert!((expectation(&rho, &e.pauli(i)) - e.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_physical_and_idempotent(dim_bits in 1usize..=5, seed in any::<u64>()) {
        let mut rng = stream(seed, &[]);
        let h = random_hermitian_unit_trace(1 << dim_bits, &mut rng);
        let qubits: Vec<usize> = (0..dim_bits).collect();
        let rho = nearest_physical_density_matrix(&h, qubits.clone()).unwrap();
        prop_assert!(rho.eigenvalues()[0] >= -1e-10);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        let again = nearest_physical_density_matrix(rho.matrix(), qubits).unwrap();
        prop_assert!(frobenius(again.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn settings_are_sorted_and_complete(k in 1usize..=5) {
        let settings = tomography_settings(k).unwrap();
        prop_assert_eq!(settings.len(), 3usize.pow(k as u32));
        for (i, s) in settings.iter().enumerate() {
            prop_assert_eq!(s, &BasisSetting::from_index(k, i));
        }
        prop_assert!(settings.windows(2).all(|w| w[0] < w[1]));
    }
}
