// SPDX-License-Identifier: Apache-2.0

//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded by a
//! 64-bit key. Keys are derived from a parent seed and a path of tags with a
//! SplitMix64 finalizer, so independent consumers (runs of a cohort, loss
//! evaluations of an epoch, input states of an evaluation) get disjoint
//! streams whose contents do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Tags naming the consumers of derived streams.
pub mod tag {
    pub const INSTANCE: u64 = 0x494e_5354;
    pub const SUBSET: u64 = 0x5355_4253;
    pub const ORDER: u64 = 0x4f52_4445;
    pub const EVAL: u64 = 0x4556_414c;
    pub const INPUT: u64 = 0x494e_5055;
    pub const RUN: u64 = 0x5255_4e5f;
    pub const PHASE: u64 = 0x5048_4153;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child key from `seed` and an ordered path of tags.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(splitmix64(acc) ^ t))
}

/// Seeds a stream directly from a key.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shorthand for `stream(derive(seed, path))`.
pub fn substream(seed: u64, path: &[u64]) -> Stream {
    stream(derive(seed, path))
}
