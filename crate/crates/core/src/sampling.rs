//! Shot sampling of local Pauli-basis measurements on the native-graph
//! state.
//!
//! [`sample_counts`] runs every shot through a fresh noisy tableau.
//! [`LocalSampler`] draws from the same distribution without touching the
//! rest of the device: the ideal outcome distribution of the measured
//! qubits is exact from the local stabilizer group, and gate errors only
//! reach the measured qubits from the measured qubits and their neighbors,
//! so a Pauli frame over that region is enough.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::counts::{Basis, BasisSetting, CountsError, CountsTable};
use crate::noise::{NoiseError, NoiseModel};
use crate::pauli::Pauli;
use crate::qrem::apply_factorwise;
use crate::stabilizer::{prepare_graph_state, LocalStabilizerGroup, StabilizerError, StabilizerState};
use crate::topology::{CzSchedule, DeviceTopology};

/// Widest subset the local sampler accepts.
pub const MAX_SAMPLED_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Counts(#[from] CountsError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("at least one shot is required")]
    NoShots,
    #[error("{0} measured qubits exceed the sampler limit of {MAX_SAMPLED_QUBITS}")]
    TooWide(usize),
}

/// Multinomial draw by sequential binomials. `probs` need not be exactly
/// normalized; the last nonzero category absorbs the remainder.
pub fn multinomial<R: Rng + ?Sized>(shots: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    let last = probs.iter().rposition(|&p| p > 0.0);
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 || mass <= 0.0 {
            break;
        }
        let p = p.max(0.0);
        if Some(i) == last {
            out[i] = remaining;
            break;
        }
        let draw = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, draw).map(|b| b.sample(rng)).unwrap_or(0);
        out[i] = k;
        remaining -= k;
        mass -= p;
    }
    out
}

fn check_setting(qubits: &[usize], setting: &BasisSetting) -> Result<(), SamplingError> {
    if setting.len() != qubits.len() {
        return Err(CountsError::SettingLength { setting: setting.len(), qubits: qubits.len() }.into());
    }
    Ok(())
}

fn tally(dense: &mut [u64], bits: impl Iterator<Item = bool>) {
    let index = bits.fold(0usize, |acc, b| (acc << 1) | b as usize);
    dense[index] += 1;
}

/// Sample `shots` outcomes of `setting` on `qubits`, preparing a fresh
/// noisy graph state per shot. X is measured as H then Z and Y as S†, H
/// then Z; each rotated qubit draws one single-qubit depolarizing error
/// after its rotation, and readout flips follow the Z measurement.
pub fn sample_counts<R: Rng + ?Sized>(
    topology: &DeviceTopology,
    schedule: &CzSchedule,
    qubits: &[usize],
    setting: &BasisSetting,
    shots: u64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<CountsTable, SamplingError> {
    if shots == 0 {
        return Err(SamplingError::NoShots);
    }
    check_setting(qubits, setting)?;
    if qubits.len() > MAX_SAMPLED_QUBITS {
        return Err(SamplingError::TooWide(qubits.len()));
    }
    let n = topology.n_qubits();
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(StabilizerError::QubitOutOfRange { qubit: q, n_qubits: n }.into());
        }
        if qubits[..i].contains(&q) {
            return Err(StabilizerError::RepeatedQubit(q).into());
        }
    }
    let mut dense = vec![0; 1usize << qubits.len()];
    for _ in 0..shots {
        let mut state = prepare_graph_state(topology, schedule, noise, rng)?;
        for (&q, &b) in qubits.iter().zip(setting.bases()) {
            match b {
                Basis::X => state.h(q),
                Basis::Y => {
                    state.s_dag(q);
                    state.h(q);
                }
                Basis::Z => continue,
            }
            if let Some(p) = noise.single_qubit_error(rng) {
                state.apply_pauli(q, p);
            }
        }
        let mut bits = Vec::with_capacity(qubits.len());
        for &q in qubits {
            let ideal = state.measure_z(q, rng);
            bits.push(noise.readout(q).apply(ideal, rng));
        }
        tally(&mut dense, bits.into_iter());
    }
    Ok(CountsTable::from_dense(setting.clone(), qubits.to_vec(), &dense)?)
}

/// Readout-only calibration circuit: every qubit prepared in the stated
/// computational state and measured in Z.
pub fn run_calibration_circuits<R: Rng + ?Sized>(
    prepared: &[bool],
    shots: u64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<CountsTable, SamplingError> {
    if shots == 0 {
        return Err(SamplingError::NoShots);
    }
    noise.check_qubits(prepared.len())?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let outcome: String = prepared
            .iter()
            .enumerate()
            .map(|(q, &bit)| if noise.readout(q).apply(bit, rng) { '1' } else { '0' })
            .collect();
        *counts.entry(outcome).or_insert(0) += 1;
    }
    let k = prepared.len();
    Ok(CountsTable::new(BasisSetting::computational(k), (0..k).collect(), shots, counts)?)
}

/// CZ touching the frame region; `None` marks an endpoint outside it.
#[derive(Clone, Copy, Debug)]
struct RegionGate {
    a: Option<usize>,
    b: Option<usize>,
}

/// Distributionally exact sampler for one qubit subset of the graph state.
#[derive(Clone, Debug)]
pub struct LocalSampler {
    qubits: Vec<usize>,
    region: Vec<usize>,
    group: LocalStabilizerGroup,
    layers: Vec<Vec<RegionGate>>,
}

impl LocalSampler {
    /// `ideal` must be the noiseless graph state of `topology`.
    pub fn new(
        topology: &DeviceTopology,
        schedule: &CzSchedule,
        ideal: &StabilizerState,
        qubits: &[usize],
    ) -> Result<Self, SamplingError> {
        schedule.validate(topology).map_err(StabilizerError::from)?;
        if qubits.len() > MAX_SAMPLED_QUBITS {
            return Err(SamplingError::TooWide(qubits.len()));
        }
        let group = ideal.local_group(qubits)?;
        let mut region = qubits.to_vec();
        let mut extra: Vec<usize> = qubits
            .iter()
            .flat_map(|&q| topology.neighbors(q).iter().copied())
            .filter(|q| !qubits.contains(q))
            .collect();
        extra.sort_unstable();
        extra.dedup();
        region.extend(extra);
        let local = |q: usize| region.iter().position(|&r| r == q);
        let layers = schedule
            .layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|e| RegionGate { a: local(e.a), b: local(e.b) })
                    .filter(|g| g.a.is_some() || g.b.is_some())
                    .collect()
            })
            .collect();
        Ok(LocalSampler { qubits: qubits.to_vec(), region, group, layers })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Measured qubits followed by their outside neighbors.
    pub fn region(&self) -> &[usize] {
        &self.region
    }

    pub fn group(&self) -> &LocalStabilizerGroup {
        &self.group
    }

    /// Outcome distribution with readout noise but no gate noise.
    pub fn readout_distribution(&self, setting: &BasisSetting, noise: &NoiseModel) -> Vec<f64> {
        let ideal = self.group.born_distribution(setting);
        let factors: Vec<_> = self.qubits.iter().map(|&q| noise.readout(q).matrix()).collect();
        apply_factorwise(&ideal, &factors)
    }

    pub fn sample<R: Rng + ?Sized>(
        &self,
        setting: &BasisSetting,
        shots: u64,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Result<CountsTable, SamplingError> {
        if shots == 0 {
            return Err(SamplingError::NoShots);
        }
        check_setting(&self.qubits, setting)?;
        if let Some(&q) = self.region.iter().find(|&&q| q >= noise.n_qubits()) {
            return Err(StabilizerError::QubitOutOfRange { qubit: q, n_qubits: noise.n_qubits() }.into());
        }
        let dense = if noise.has_gate_noise() {
            self.sample_with_frames(setting, shots, noise, rng)
        } else {
            multinomial(shots, &self.readout_distribution(setting, noise), rng)
        };
        Ok(CountsTable::from_dense(setting.clone(), self.qubits.clone(), &dense)?)
    }

    fn sample_with_frames<R: Rng + ?Sized>(
        &self,
        setting: &BasisSetting,
        shots: u64,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> Vec<u64> {
        let k = self.qubits.len();
        let ideal = self.group.born_distribution(setting);
        let mut cdf = Vec::with_capacity(ideal.len());
        let mut acc = 0.0;
        for p in &ideal {
            acc += p;
            cdf.push(acc);
        }
        let mut dense = vec![0; ideal.len()];
        let m = self.region.len();
        let mut fx = vec![false; m];
        let mut fz = vec![false; m];
        let kick = |fx: &mut [bool], fz: &mut [bool], i: usize, p: Pauli| {
            let (x, z) = p.bits();
            fx[i] ^= x;
            fz[i] ^= z;
        };
        for _ in 0..shots {
            fx.iter_mut().for_each(|b| *b = false);
            fz.iter_mut().for_each(|b| *b = false);
            if noise.single_qubit_depolarizing() > 0.0 {
                for i in 0..m {
                    if let Some(p) = noise.single_qubit_error(rng) {
                        kick(&mut fx, &mut fz, i, p);
                    }
                }
            }
            for layer in &self.layers {
                for g in layer {
                    if let (Some(a), Some(b)) = (g.a, g.b) {
                        let (xa, xb) = (fx[a], fx[b]);
                        fz[a] ^= xb;
                        fz[b] ^= xa;
                    }
                }
                if noise.cz_depolarizing() > 0.0 {
                    for g in layer {
                        if let Some((pa, pb)) = noise.cz_error(rng) {
                            if let Some(a) = g.a {
                                kick(&mut fx, &mut fz, a, pa);
                            }
                            if let Some(b) = g.b {
                                kick(&mut fx, &mut fz, b, pb);
                            }
                        }
                    }
                }
            }
            let u: f64 = rng.random();
            let ideal_index = cdf.partition_point(|&c| c <= u).min(ideal.len() - 1);
            let bits = setting.bases().iter().enumerate().map(|(i, &basis)| {
                let (bx, bz) = basis.bits();
                let mut bit = (ideal_index >> (k - 1 - i)) & 1 == 1;
                bit ^= (fx[i] && bz) ^ (fz[i] && bx);
                if basis != Basis::Z {
                    if let Some(p) = noise.single_qubit_error(rng) {
                        bit ^= p.bits().0;
                    }
                }
                noise.readout(self.qubits[i]).apply(bit, rng)
            });
            let bits: Vec<bool> = bits.collect();
            tally(&mut dense, bits.into_iter());
        }
        dense
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::ReadoutError;
    use crate::rng::stream;
    use crate::topology::{schedule_cz_layers, Edge};

    #[test]
    fn multinomial_conserves_shots() {
        let mut rng = stream(1, &[]);
        let c = multinomial(4000, &[0.5, 0.0, 0.25, 0.25], &mut rng);
        assert_eq!(c.iter().sum::<u64>(), 4000);
        assert_eq!(c[1], 0);
        assert_eq!(multinomial(10, &[0.0, 1.0], &mut rng), vec![0, 10]);
    }

    #[test]
    fn plus_state_in_x_is_deterministic() {
        let t = DeviceTopology::new("pair", 2, [(0, 1)]).unwrap();
        let s = schedule_cz_layers(&t);
        let noise = NoiseModel::noiseless(2);
        let mut rng = stream(2, &[]);
        // X on qubit 0 alone is not a stabilizer, but XZ is.
        let xz = sample_counts(&t, &s, &[0, 1], &BasisSetting::parse("XZ").unwrap(), 200, &noise, &mut rng).unwrap();
        assert_eq!(xz.get("00") + xz.get("11"), 200);
    }

    #[test]
    fn pair_in_zz_is_uniform() {
        let t = DeviceTopology::new("pair", 2, [(0, 1)]).unwrap();
        let s = schedule_cz_layers(&t);
        let noise = NoiseModel::noiseless(2);
        let ideal = StabilizerState::graph_state(&t);
        let sampler = LocalSampler::new(&t, &s, &ideal, &[0, 1]).unwrap();
        assert_eq!(sampler.readout_distribution(&BasisSetting::parse("ZZ").unwrap(), &noise), vec![0.25; 4]);
    }

    #[test]
    fn calibration_flip_rate() {
        let noise = NoiseModel::new(vec![ReadoutError::new(0.0, 0.1).unwrap(); 3], 0.0, 0.0).unwrap();
        let mut rng = stream(3, &[]);
        let t = run_calibration_circuits(&[true; 3], 20_000, &noise, &mut rng).unwrap();
        for i in 0..3 {
            let flips = 20_000 - t.ones_at(i);
            // sd = sqrt(20000 * 0.09) ≈ 42
            assert!((flips as f64 - 2000.0).abs() < 5.0 * 42.5, "qubit {i}: {flips}");
        }
    }

    #[test]
    fn region_is_subset_plus_neighbors() {
        let t = DeviceTopology::unit_cell();
        let s = schedule_cz_layers(&t);
        let ideal = StabilizerState::graph_state(&t);
        let pair = t.pair_neighborhood(Edge::new(2, 3));
        let sampler = LocalSampler::new(&t, &s, &ideal, &pair).unwrap();
        assert_eq!(sampler.region(), &[2, 3, 0, 1, 4]);
    }
}
