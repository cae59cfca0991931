//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by
//! `(seed, stream)`, so work split across threads by stream index reproduces
//! the serial result exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Namespaced stream id: the high 16 bits carry a purpose tag so that, for
/// example, trial 3 of "projections" never collides with trial 3 of "bodies".
pub fn tagged(tag: u16, index: u64) -> u64 {
    ((tag as u64) << 48) | (index & 0x0000_ffff_ffff_ffff)
}

/// Independent seed for sub-experiment `index` under purpose `tag`
/// (SplitMix64 finalizer over the packed inputs).
pub fn derive(seed: u64, tag: u16, index: u64) -> u64 {
    let mut z = seed ^ tagged(tag, index).rotate_left(17) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
