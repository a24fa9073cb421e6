mod common;

use common::*;
use hexent_core::counts::{Basis, BasisSetting};
use hexent_core::density::CMatrix;
use hexent_core::noise::NoiseModel;
use hexent_core::rng::stream;
use hexent_core::stabilizer::{prepare_graph_state, reduced_density_matrix, StabilizerError, StabilizerState};
use hexent_core::topology::{schedule_cz_layers, DeviceTopology};
use proptest::prelude::*;
use rand::Rng;

fn connected_graph(n: usize, extra: &[(usize, usize)]) -> Vec<(usize, usize)> {
    // Random spanning tree from the first entries, then extra edges.
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (extra[v % extra.len()].0 % v, v)).collect();
    for &(a, b) in extra {
        let (a, b) = (a % n, b % n);
        let e = (a.min(b), a.max(b));
        if a != b && !edges.iter().any(|&(p, q)| (p.min(q), p.max(q)) == e) {
            edges.push(e);
        }
    }
    edges
}

/// Born probabilities of a setting from a density matrix: rotate each
/// qubit into Z and read the diagonal.
fn born_from_density(rho: &CMatrix, setting: &BasisSetting) -> Vec<f64> {
    let k = setting.len();
    let mut m = rho.clone();
    for (q, b) in setting.bases().iter().enumerate() {
        match b {
            Basis::X => m = conjugate(&m, k, q, &hadamard()),
            Basis::Y => {
                m = conjugate(&m, k, q, &s_dagger());
                m = conjugate(&m, k, q, &hadamard());
            }
            Basis::Z => {}
        }
    }
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

#[test]
fn three_qubit_path_is_pure() {
    let t = DeviceTopology::new("path", 3, [(0, 1), (1, 2)]).unwrap();
    let rho = reduced_density_matrix(&StabilizerState::graph_state(&t), &[0, 1, 2]).unwrap();
    let psi = graph_statevector(3, &[(0, 1), (1, 2)]);
    assert!(frobenius(rho.matrix(), &projector(&psi)) < 1e-12);
    let vals = rho.eigenvalues();
    assert!((vals[7] - 1.0).abs() < 1e-12);
    assert!(vals[..7].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn noiseless_preparation_is_deterministic() {
    let t = DeviceTopology::unit_cell();
    let s = schedule_cz_layers(&t);
    let noise = NoiseModel::noiseless(t.n_qubits());
    let mut rng = stream(4, &[]);
    let first = prepare_graph_state(&t, &s, &noise, &mut rng).unwrap();
    for _ in 0..5 {
        let again = prepare_graph_state(&t, &s, &noise, &mut rng).unwrap();
        assert_eq!(again.stabilizers(), first.stabilizers());
    }
    let expected: Vec<String> = StabilizerState::graph_state(&t).stabilizers().iter().map(|p| p.to_string()).collect();
    let got: Vec<String> = first.stabilizers().iter().map(|p| p.to_string()).collect();
    assert_eq!(got, expected);
}

#[test]
fn oversized_subset_is_rejected() {
    let t = DeviceTopology::new("path", 12, (0..11).map(|i| (i, i + 1))).unwrap();
    let state = StabilizerState::graph_state(&t);
    let all: Vec<usize> = (0..11).collect();
    assert_eq!(reduced_density_matrix(&state, &all), Err(StabilizerError::SubsetTooLarge(11)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_states_match_statevector(
        n in 2usize..7,
        extra in prop::collection::vec((0usize..8, 0usize..8), 1..6),
        subset_seed in any::<u64>(),
    ) {
        let edges = connected_graph(n, &extra);
        let t = DeviceTopology::new("g", n, edges.iter().copied()).unwrap();
        let state = StabilizerState::graph_state(&t);
        let full = projector(&graph_statevector(n, &edges));

        let mut rng = stream(subset_seed, &[]);
        let size = rng.random_range(1..=n.min(4));
        let mut subset: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = rng.random_range(i..n);
            subset.swap(i, j);
        }
        subset.truncate(size);

        let rho = reduced_density_matrix(&state, &subset).unwrap();
        let oracle = partial_trace(&full, n, &subset);
        prop_assert!(frobenius(rho.matrix(), &oracle) < 1e-12);
        prop_assert!(rho.is_positive_semidefinite());

        let group = state.local_group(&subset).unwrap();
        let setting = BasisSetting::new((0..size).map(|_| Basis::ALL[rng.random_range(0..3)]).collect());
        let born = group.born_distribution(&setting);
        for (a, b) in born.iter().zip(born_from_density(&oracle, &setting)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tableau_stays_full_rank(ops in prop::collection::vec((0u8..7, 0usize..6, 0usize..6), 1..60), seed in any::<u64>()) {
        let mut state = StabilizerState::zero_state(6);
        let mut rng = stream(seed, &[]);
        for (op, a, b) in ops {
            match op {
                0 => state.h(a),
                1 => state.s(a),
                2 => state.s_dag(a),
                3 if a != b => state.cz(a, b),
                4 => state.apply_pauli(a, hexent_core::pauli::Pauli::Y),
                5 => {
                    state.measure_z(a, &mut rng);
                }
                _ => state.h(b),
            }
            prop_assert!(state.is_valid());
            prop_assert_eq!(state.stabilizer_rank(), 6);
        }
    }
}
