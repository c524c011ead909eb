//! Seeded random streams.
//!
//! Every stochastic routine takes a 64-bit seed and builds a [`SpinRng`]
//! from it. Child streams (per trial, per node, per parameter value) are
//! derived with [`derive_seed`], which hashes the parent seed and the
//! child index through two rounds of the SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all sampling.
pub type SpinRng = ChaCha8Rng;

/// Algorithm name recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

pub fn rng_from_seed(seed: u64) -> SpinRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` of `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}
