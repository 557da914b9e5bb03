//! Deterministic random-number plumbing.
//!
//! Coordinate assignment consumes an ordinary seeded stream
//! ([`seeded_stream`]). Edge creation instead uses a counter-based stream
//! keyed by `(seed, i, j)` so that every unordered node pair owns exactly one
//! uniform draw. The draw for a pair is independent of iteration order and of
//! how pairs are partitioned across threads, which makes generation
//! bit-reproducible at any parallelism degree.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Sub-stream salts for the phases of multiplex construction.
pub mod salt {
    pub const COORDS_LAYER1: u64 = 0x11;
    pub const COORDS_LAYER2: u64 = 0x12;
    pub const EDGES_LAYER1: u64 = 0x21;
    pub const EDGES_LAYER2: u64 = 0x22;
    pub const PERSISTENCE: u64 = 0x31;
}

/// Seeded sequential stream for coordinate sampling.
pub fn seeded_stream(seed: u64, salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(mix64(seed ^ mix64(salt)))
}

/// One uniform draw per unordered node pair, keyed by `(seed, i, j)`.
#[derive(Debug, Clone, Copy)]
pub struct PairStream {
    key: u64,
}

impl PairStream {
    pub fn new(seed: u64, salt: u64) -> Self {
        Self {
            key: mix64(seed ^ mix64(salt)),
        }
    }

    /// Uniform draw in `[0, 1)` for the unordered pair `{i, j}`.
    #[inline]
    pub fn uniform(&self, i: u32, j: u32) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let z = mix64(self.key ^ mix64(((a as u64) << 32) | b as u64));
        // 53 high bits -> [0, 1)
        (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
