//! Seeded random streams.
//!
//! Every stochastic step of an experiment draws from its own ChaCha stream,
//! derived from the master seed and a path of integer labels (domain, edge,
//! setting, replicate, ...). Streams never depend on evaluation order, so
//! per-edge and per-replicate work can be distributed freely.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type ExperimentRng = ChaCha8Rng;

/// Stream labels for the top-level experiment phases.
pub mod domain {
    pub const PREPARATION: u64 = 0x01;
    pub const TOMOGRAPHY: u64 = 0x02;
    pub const CALIBRATION: u64 = 0x03;
    pub const BOOTSTRAP: u64 = 0x04;
    pub const NOISE_PROFILE: u64 = 0x05;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive the seed of the stream at `path` below `master`.
pub fn stream_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// Independent generator for the stream at `path` below `master`.
pub fn stream(master: u64, path: &[u64]) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, path))
}
