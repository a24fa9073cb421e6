#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod certify;
pub mod counts;
pub mod density;
pub mod noise;
pub mod pauli;
pub mod qrem;
pub mod rng;
pub mod sampling;
pub mod stabilizer;
pub mod stats;
pub mod tomography;
pub mod topology;
