//! Deterministic random streams.
//!
//! Every unit of parallel work (a grid cell, a trial, a run) owns a
//! [`SimRng`] derived from `(master_seed, stream_index)`. Results therefore do
//! not depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn stream_rng(master_seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Packs a two-level index (for example grid cell and trial) into one stream id.
pub fn stream_id(outer: u32, inner: u32) -> u64 {
    (u64::from(outer) << 32) | u64::from(inner)
}
