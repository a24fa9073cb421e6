//! Stabilizer tableau simulation of native-graph states.
//!
//! The tableau keeps `n` destabilizer rows, `n` stabilizer rows and one
//! scratch row, bit-packed in 64-qubit words, and measures in the Z basis by
//! the Aaronson-Gottesman procedure.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::Rng;

use crate::counts::BasisSetting;
use crate::density::{pauli_phase, CMatrix, DensityMatrix};
use crate::noise::NoiseModel;
use crate::pauli::{product_phase, LocalPauli, Pauli, PauliString};
use crate::topology::{CzSchedule, DeviceTopology, TopologyError};

/// Largest subset handled by [`reduced_density_matrix`].
pub const MAX_REDUCED_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilizerError {
    #[error("subset of {0} qubits exceeds the limit of {MAX_REDUCED_QUBITS}")]
    SubsetTooLarge(usize),
    #[error("qubit {qubit} is outside the {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} is listed twice")]
    RepeatedQubit(usize),
    #[error(transparent)]
    Schedule(#[from] TopologyError),
    #[error("noise model covers {got} qubits, state has {expected}")]
    NoiseQubits { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

impl StabilizerState {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut state =
            StabilizerState { n, words, x: vec![0; rows * words], z: vec![0; rows * words], r: vec![false; rows] };
        for q in 0..n {
            let (w, b) = (q / 64, 1u64 << (q % 64));
            state.x[q * words + w] |= b;
            state.z[(n + q) * words + w] |= b;
        }
        state
    }

    /// Ideal graph state of `topology`, written down directly: stabilizer
    /// `v` is X on `v` and Z on each neighbor.
    pub fn graph_state(topology: &DeviceTopology) -> Self {
        let n = topology.n_qubits();
        let mut state = StabilizerState::zero_state(n);
        state.x.iter_mut().for_each(|w| *w = 0);
        state.z.iter_mut().for_each(|w| *w = 0);
        let words = state.words;
        for v in 0..n {
            let (w, b) = (v / 64, 1u64 << (v % 64));
            state.z[v * words + w] |= b;
            state.x[(n + v) * words + w] |= b;
            for &u in topology.neighbors(v) {
                state.z[(n + v) * words + u / 64] |= 1u64 << (u % 64);
            }
        }
        state
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(&self, row: usize, q: usize) -> (bool, bool) {
        let idx = row * self.words + q / 64;
        let b = 1u64 << (q % 64);
        (self.x[idx] & b != 0, self.z[idx] & b != 0)
    }

    fn rows_to_update(&self) -> core::ops::Range<usize> {
        0..2 * self.n
    }

    pub fn h(&mut self, q: usize) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        for row in self.rows_to_update() {
            let i = row * self.words + w;
            let (xb, zb) = (self.x[i] & b, self.z[i] & b);
            if xb != 0 && zb != 0 {
                self.r[row] ^= true;
            }
            self.x[i] = (self.x[i] & !b) | zb;
            self.z[i] = (self.z[i] & !b) | xb;
        }
    }

    pub fn s(&mut self, q: usize) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        for row in self.rows_to_update() {
            let i = row * self.words + w;
            let (xb, zb) = (self.x[i] & b, self.z[i] & b);
            if xb != 0 && zb != 0 {
                self.r[row] ^= true;
            }
            self.z[i] ^= xb;
        }
    }

    pub fn s_dag(&mut self, q: usize) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        for row in self.rows_to_update() {
            let i = row * self.words + w;
            let (xb, zb) = (self.x[i] & b, self.z[i] & b);
            if xb != 0 && zb == 0 {
                self.r[row] ^= true;
            }
            self.z[i] ^= xb;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for row in self.rows_to_update() {
            let (xa, za) = self.bit(row, a);
            let (xb, zb) = self.bit(row, b);
            if xa && xb && (za ^ zb) {
                self.r[row] ^= true;
            }
            if xb {
                self.z[row * self.words + a / 64] ^= 1u64 << (a % 64);
            }
            if xa {
                self.z[row * self.words + b / 64] ^= 1u64 << (b % 64);
            }
        }
    }

    /// Apply a Pauli gate: flips the sign of every row it anticommutes with.
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        if p == Pauli::I {
            return;
        }
        let (px, pz) = p.bits();
        for row in self.rows_to_update() {
            let (x, z) = self.bit(row, q);
            if (px && z) ^ (pz && x) {
                self.r[row] ^= true;
            }
        }
    }

    /// Row `h` becomes `row i · row h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut e = 2 * (self.r[h] as i32 + self.r[i] as i32);
        for w in 0..self.words {
            let (hi, ii) = (h * self.words + w, i * self.words + w);
            e += product_phase(self.x[ii], self.z[ii], self.x[hi], self.z[hi]);
            self.x[hi] ^= self.x[ii];
            self.z[hi] ^= self.z[ii];
        }
        self.r[h] = e.rem_euclid(4) == 2;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            self.x[dst * self.words + w] = self.x[src * self.words + w];
            self.z[dst * self.words + w] = self.z[src * self.words + w];
        }
        self.r[dst] = self.r[src];
    }

    fn clear_row(&mut self, row: usize) {
        for w in 0..self.words {
            self.x[row * self.words + w] = 0;
            self.z[row * self.words + w] = 0;
        }
        self.r[row] = false;
    }

    /// Measure qubit `q` in the Z basis, collapsing the state.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let n = self.n;
        let random_row = (n..2 * n).find(|&row| self.bit(row, q).0);
        match random_row {
            Some(p) => {
                for row in 0..2 * n {
                    if row != p && self.bit(row, q).0 {
                        self.rowsum(row, p);
                    }
                }
                self.copy_row(p - n, p);
                self.clear_row(p);
                let outcome: bool = rng.random();
                self.z[p * self.words + q / 64] |= 1u64 << (q % 64);
                self.r[p] = outcome;
                outcome
            }
            None => {
                let scratch = 2 * n;
                self.clear_row(scratch);
                for row in 0..n {
                    if self.bit(row, q).0 {
                        self.rowsum(scratch, row + n);
                    }
                }
                self.r[scratch]
            }
        }
    }

    fn row_string(&self, row: usize) -> PauliString {
        let mut p = PauliString::identity(self.n);
        let len = p.x.len();
        let start = row * self.words;
        p.x.copy_from_slice(&self.x[start..start + len]);
        p.z.copy_from_slice(&self.z[start..start + len]);
        p.negative = self.r[row];
        p
    }

    /// Stabilizer generators, one per qubit.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (self.n..2 * self.n).map(|row| self.row_string(row)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|row| self.row_string(row)).collect()
    }

    /// GF(2) rank of the stabilizer generators.
    pub fn stabilizer_rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (self.n..2 * self.n)
            .map(|row| {
                let mut bits = Vec::with_capacity(2 * self.words);
                bits.extend_from_slice(&self.x[row * self.words..(row + 1) * self.words]);
                bits.extend_from_slice(&self.z[row * self.words..(row + 1) * self.words]);
                bits
            })
            .collect();
        let columns = 2 * self.words * 64;
        let mut rank = 0;
        for col in 0..columns {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r][w] & b != 0 {
                    let (src, dst) = if r < rank {
                        let (lo, hi) = rows.split_at_mut(rank);
                        (&hi[0], &mut lo[r])
                    } else {
                        let (lo, hi) = rows.split_at_mut(r);
                        (&lo[rank], &mut hi[0])
                    };
                    dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Check the tableau invariants: stabilizers commute pairwise and have
    /// full rank, and destabilizer `i` anticommutes only with stabilizer `i`.
    pub fn is_valid(&self) -> bool {
        let stabs = self.stabilizers();
        let destabs = self.destabilizers();
        for i in 0..self.n {
            for j in 0..self.n {
                if !stabs[i].commutes_with(&stabs[j]) {
                    return false;
                }
                if destabs[i].commutes_with(&stabs[j]) == (i == j) {
                    return false;
                }
            }
        }
        self.stabilizer_rank() == self.n
    }

    /// Generators of the stabilizer subgroup supported inside `qubits`.
    pub fn local_group(&self, qubits: &[usize]) -> Result<LocalStabilizerGroup, StabilizerError> {
        check_subset(qubits, self.n, 32)?;
        let mut inside = vec![false; self.n];
        for &q in qubits {
            inside[q] = true;
        }
        let mut rows = self.stabilizers();
        // Eliminate every column outside the subset; rows never used as a
        // pivot end up supported on the subset.
        let mut pivot_end = 0;
        for q in (0..self.n).filter(|&q| !inside[q]) {
            for component in [Pauli::X, Pauli::Z] {
                let has = |p: &PauliString| {
                    let (px, pz) = p.get(q).bits();
                    if component == Pauli::X {
                        px
                    } else {
                        pz
                    }
                };
                let Some(pivot) = (pivot_end..rows.len()).find(|&r| has(&rows[r])) else {
                    continue;
                };
                rows.swap(pivot_end, pivot);
                let pivot_row = rows[pivot_end].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != pivot_end && has(row) {
                        row.left_multiply(&pivot_row);
                    }
                }
                pivot_end += 1;
            }
        }
        let generators =
            rows[pivot_end..].iter().map(|p| p.restrict(qubits).expect("eliminated rows are local")).collect();
        Ok(LocalStabilizerGroup { qubits: qubits.to_vec(), generators })
    }
}

fn check_subset(qubits: &[usize], n: usize, limit: usize) -> Result<(), StabilizerError> {
    if qubits.len() > limit {
        return Err(StabilizerError::SubsetTooLarge(qubits.len()));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(StabilizerError::QubitOutOfRange { qubit: q, n_qubits: n });
        }
        if qubits[..i].contains(&q) {
            return Err(StabilizerError::RepeatedQubit(q));
        }
    }
    Ok(())
}

/// Stabilizer subgroup of a state restricted to a qubit subset. Its
/// elements `g` give the reduced state `ρ_S = 2^{-|S|} Σ g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalStabilizerGroup {
    qubits: Vec<usize>,
    generators: Vec<LocalPauli>,
}

impl LocalStabilizerGroup {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn generators(&self) -> &[LocalPauli] {
        &self.generators
    }

    /// All `2^r` group elements, identity first.
    pub fn elements(&self) -> Vec<LocalPauli> {
        let mut out = vec![LocalPauli::identity(self.qubits.len())];
        for g in &self.generators {
            let products: Vec<_> = out.iter().map(|e| e.mul(g).expect("stabilizer elements commute")).collect();
            out.extend(products);
        }
        out
    }

    pub fn density_matrix(&self) -> CMatrix {
        let k = self.qubits.len();
        let dim = 1usize << k;
        let scale = 1.0 / dim as f64;
        let mut m = CMatrix::zeros(dim, dim);
        for g in self.elements() {
            let x = g.x_mask() as usize;
            for j in 0..dim {
                m[(j ^ x, j)] += pauli_phase(&g, j) * Complex64::new(scale, 0.0);
            }
        }
        m
    }

    /// Exact outcome distribution for measuring each qubit in `setting`:
    /// `p(b) = 2^{-k} Σ_g s_g (-1)^{b · supp(g)}` over elements `g` that
    /// agree with the setting on their support.
    pub fn born_distribution(&self, setting: &BasisSetting) -> Vec<f64> {
        let k = self.qubits.len();
        assert_eq!(setting.len(), k, "setting width");
        let (bx, bz) = setting.masks();
        let dim = 1usize << k;
        let mut p = vec![0.0; dim];
        for g in self.elements() {
            let supp = g.support();
            if g.x_mask() != bx & supp || g.z_mask() != bz & supp {
                continue;
            }
            let sign = if g.is_negative() { -1.0 } else { 1.0 };
            for (b, slot) in p.iter_mut().enumerate() {
                let parity = (b as u32 & supp).count_ones() % 2;
                *slot += if parity == 0 { sign } else { -sign };
            }
        }
        let scale = 1.0 / dim as f64;
        p.iter_mut().for_each(|v| *v *= scale);
        p
    }
}

/// Exact reduced density matrix of `state` on `qubits`.
pub fn reduced_density_matrix(state: &StabilizerState, qubits: &[usize]) -> Result<DensityMatrix, StabilizerError> {
    check_subset(qubits, state.n_qubits(), MAX_REDUCED_QUBITS)?;
    let group = state.local_group(qubits)?;
    Ok(DensityMatrix::new(qubits.to_vec(), group.density_matrix()).expect("stabilizer reduced states are valid"))
}

/// Prepare the native-graph state: Hadamard on every qubit, then the CZ
/// layers of `schedule`. Depolarizing Pauli errors from `noise` are drawn
/// after the Hadamard layer and after each CZ layer.
pub fn prepare_graph_state<R: Rng + ?Sized>(
    topology: &DeviceTopology,
    schedule: &CzSchedule,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<StabilizerState, StabilizerError> {
    schedule.validate(topology)?;
    if noise.n_qubits() != topology.n_qubits() {
        return Err(StabilizerError::NoiseQubits { got: noise.n_qubits(), expected: topology.n_qubits() });
    }
    let n = topology.n_qubits();
    let mut state = StabilizerState::zero_state(n);
    for q in 0..n {
        state.h(q);
    }
    if noise.single_qubit_depolarizing() > 0.0 {
        for q in 0..n {
            if let Some(p) = noise.single_qubit_error(rng) {
                state.apply_pauli(q, p);
            }
        }
    }
    for layer in schedule.layers() {
        for e in layer {
            state.cz(e.a, e.b);
        }
        if noise.cz_depolarizing() > 0.0 {
            for e in layer {
                if let Some((pa, pb)) = noise.cz_error(rng) {
                    state.apply_pauli(e.a, pa);
                    state.apply_pauli(e.b, pb);
                }
            }
        }
    }
    Ok(state)
}
