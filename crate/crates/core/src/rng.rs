//! Seed plumbing. All randomness in the toolkit flows from one root seed
//! through named substreams so that every artifact is reproducible from
//! (seed, config) alone.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives a deterministic RNG for a named substream of the root seed.
///
/// Different names yield independent streams; the same (seed, name) pair
/// always yields the same stream.
pub fn substream(root_seed: u64, name: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&root_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&h.to_le_bytes());
    // splitmix finalizer over the combination fills the rest
    let mut z = root_seed ^ h.rotate_left(32);
    for chunk in seed[16..].chunks_mut(8) {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = z;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^= x >> 31;
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
