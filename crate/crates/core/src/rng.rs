//! Seed derivation for reproducible, non-overlapping random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded with a
//! `u64`. Loops that need many streams derive child seeds from a master seed
//! with [`derive_seed`], a SplitMix64 mix of `(master, counter, purpose)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream purposes used by the transfer loop.
pub mod purpose {
    pub const EXPERT_SESSION: u64 = 1;
    pub const LEARNER_SESSION: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const LEARN: u64 = 4;
}

/// Creates the generator for a seed.
pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One SplitMix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for stream `(counter, purpose)` under `master`.
///
/// `counter` is typically the loop iteration and must stay below 2^56.
pub fn derive_seed(master: u64, counter: u64, purpose: u64) -> u64 {
    splitmix64(master ^ splitmix64((counter << 8) | (purpose & 0xff)))
}
