//! Deterministic random streams derived from one experiment seed.
//!
//! Every randomized decision (neuron placement, train/test splits, fold
//! shuffling, low-sample trial resampling) draws from its own ChaCha stream so
//! the streams stay independent while remaining reproducible from a single
//! 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id for input-layer neuron placement.
pub const LAYOUT_STREAM: u64 = 1;
/// Stream id for train/test splitting.
pub const SPLIT_STREAM: u64 = 2;
/// Stream id for cross-validation fold shuffling.
pub const FOLD_STREAM: u64 = 3;
/// Base stream id for low-sample trials; trial `t` uses `TRIAL_STREAM_BASE + t`.
pub const TRIAL_STREAM_BASE: u64 = 0x100;

/// Builds the RNG for (`seed`, `stream`). Same pair, same sequence, always.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
