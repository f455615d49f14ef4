//! Seed derivation and random streams.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] seeded
//! through [`mix`], a SplitMix64 finalizer. ChaCha8 output is specified
//! bit-for-bit, so episodes replay identically on every platform.
//!
//! Episode `i` of a run with master seed `m` uses seed `mix(m, i)`. Inside an
//! episode each consumer draws from its own stream, `stream(seed, Stream::X)`,
//! so adding draws to one consumer never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `seed + GOLDEN * (index + 1)`.
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of episode `index` under `master_seed`.
pub fn episode_seed(master_seed: u64, index: u64) -> u64 {
    mix(master_seed, index)
}

/// Independent substreams derived from one episode seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Poisson arrival counts.
    Spawn = 1,
    /// Lane class/direction and per-obstacle length and speed.
    Class = 2,
    /// Agent and goal initial placement.
    Placement = 3,
    /// Final action sampling inside the planner.
    Planner = 4,
    /// Noise of stochastic forward models.
    Model = 5,
    /// Uniform-random baseline policy.
    Policy = 6,
}

pub fn stream(seed: u64, which: Stream) -> Rng {
    Rng::seed_from_u64(mix(seed, 0x5EED_0000 + which as u64))
}
