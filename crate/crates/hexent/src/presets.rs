//! Device layouts and readout profiles shipped with the crate.

use hexent_core::topology::DeviceTopology;

use crate::error::{Error, Result};
use crate::formats::parse_topology;

const ROCHESTER: &str = include_str!("../data/rochester.json");
const MANHATTAN: &str = include_str!("../data/manhattan.json");

pub const TOPOLOGY_PRESETS: [&str; 2] = ["rochester", "manhattan"];

/// 53-qubit layout, transcribed from the published device figure.
pub fn rochester() -> DeviceTopology {
    parse_topology(ROCHESTER, "rochester preset").expect("shipped preset is valid")
}

/// 65-qubit layout; the same graph as `generate_heavy_hex(4, 2)`.
pub fn manhattan() -> DeviceTopology {
    parse_topology(MANHATTAN, "manhattan preset").expect("shipped preset is valid")
}

pub fn topology_preset(name: &str) -> Result<DeviceTopology> {
    match name {
        "rochester" => Ok(rochester()),
        "manhattan" => Ok(manhattan()),
        _ => Err(Error::invalid(
            "topology preset",
            format!("unknown preset {name:?}, expected one of {TOPOLOGY_PRESETS:?}"),
        )),
    }
}

/// Mean and standard deviation of the per-qubit readout error rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutProfile {
    pub mean: f64,
    pub stddev: f64,
}

pub const ROCHESTER_READOUT: ReadoutProfile = ReadoutProfile { mean: 0.126, stddev: 0.093 };
pub const MANHATTAN_READOUT: ReadoutProfile = ReadoutProfile { mean: 0.021, stddev: 0.015 };

pub fn readout_profile(name: &str) -> Result<ReadoutProfile> {
    match name {
        "rochester" => Ok(ROCHESTER_READOUT),
        "manhattan" => Ok(MANHATTAN_READOUT),
        _ => Err(Error::invalid(
            "readout profile",
            format!("unknown profile {name:?}, expected one of {TOPOLOGY_PRESETS:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::num::NonZeroUsize;
    use hexent_core::topology::generate_heavy_hex;

    #[test]
    fn preset_sizes() {
        let r = rochester();
        assert_eq!((r.name(), r.n_qubits(), r.edges().len()), ("rochester", 53, 58));
        let m = manhattan();
        assert_eq!((m.name(), m.n_qubits(), m.edges().len()), ("manhattan", 65, 72));
        for t in [&r, &m] {
            assert!(t.is_bipartite());
            assert_eq!(t.max_degree(), 3);
        }
    }

    #[test]
    fn manhattan_is_the_generated_lattice() {
        let g = generate_heavy_hex(NonZeroUsize::new(4).unwrap(), NonZeroUsize::new(2).unwrap());
        assert_eq!(manhattan().edges(), g.edges());
    }

    #[test]
    fn unknown_names_are_validation_errors() {
        assert_eq!(topology_preset("falcon").unwrap_err().exit_code(), 1);
        assert!(readout_profile("falcon").is_err());
    }
}
