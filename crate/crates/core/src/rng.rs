//! Seeding contract shared by every randomized operation.
//!
//! All generators are `ChaCha8Rng` seeded from a `u64`. Per-item seeds
//! (one per sampled stream, replicate or worker) are derived from a base
//! seed with [`derive_seed`], so results never depend on thread count or
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` under `base`:
/// `mix64(base + (index + 1) * 0x9e3779b97f4a7c15)` with wrapping arithmetic.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
