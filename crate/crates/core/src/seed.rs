//! Counter-based seed derivation.
//!
//! Independent RNG streams (one per forest tree, per participant, per script
//! segment) are keyed by a tuple of integers so that adding or removing one
//! unit never shifts the stream of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a sequence of keys into one 64-bit seed.
pub fn derive_seed(keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(keys.len() as u64), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

/// A ChaCha8 stream keyed by `keys`.
pub fn stream(keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(keys))
}
