//! Seeded random streams.
//!
//! Each random ingredient of a model draws from its own ChaCha stream of the
//! master seed, so changing one part of a configuration (e.g. the ring
//! coupling) never shifts the numbers drawn for another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_STAR: u64 = 1;
pub const STREAM_GUE: u64 = 2;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for work item `index` of a batch started from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
