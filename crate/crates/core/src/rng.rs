//! Counter-based seeding.
//!
//! Every random draw in the crate comes from a generator keyed by the run
//! seed plus a path of work-item indices (distribution, trajectory, trap,
//! ...). Results therefore do not depend on the order in which parallel
//! workers pick up items.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a 64-bit seed for the work item identified by `path`.
pub fn stream_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &id| {
        splitmix64(acc ^ splitmix64(id))
    })
}

pub fn stream_rng(seed: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, path))
}
