//! Seed splitting.
//!
//! A run is configured with a single 64-bit master seed. Each randomized
//! component draws its own stream seed as `splitmix64(master + (id+1)*GOLDEN)`
//! where `GOLDEN` is the usual splitmix increment. Streams are therefore
//! decorrelated but fully determined by `(master, component)`, so methods
//! compared under the same master seed share instance-level randomness.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Randomized components, used as stream identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    MctsSearch = 0,
    BiasedSampling = 1,
    SetCover = 2,
    Oracle = 3,
    InstanceGen = 4,
}

/// The splitmix64 output function.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a component's stream under the given master seed.
pub fn stream_seed(master: u64, stream: Stream) -> u64 {
    splitmix64(master.wrapping_add((stream as u64 + 1).wrapping_mul(GOLDEN)))
}

/// Deterministic RNG for a component's stream.
pub fn stream_rng(master: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, stream))
}
