//! Fixtures shared by the benchmarks.

use hdnet_core::model::generate::{gen_random, gen_worst_case};
use hdnet_core::{DiamondNetwork, LinkCapacity};

pub fn worst_case(n: usize) -> DiamondNetwork {
    gen_worst_case(n, LinkCapacity::Unbounded).expect("n >= 2")
}

pub fn random(n: usize, seed: u64) -> DiamondNetwork {
    gen_random(n, seed, 0.0, 1.0).expect("valid range")
}
