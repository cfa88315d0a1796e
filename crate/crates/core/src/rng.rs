//! Seed splitting.
//!
//! A single 64-bit seed fans out into independent ChaCha8 streams. The stream
//! id is `(tag << 32) | index`, where `tag` names the consumer (graph
//! generation, edge labelling, replica dynamics, ...) and `index` separates
//! parallel consumers of the same kind, e.g. simulation replicas.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum StreamTag {
    Generator = 1,
    Visibility = 2,
    Models = 3,
    Replica = 4,
    Surrogate = 5,
}

/// Deterministic sub-stream for `(seed, tag, index)`.
pub fn substream(seed: u64, tag: StreamTag, index: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tag as u64) << 32) | index as u64);
    rng
}

/// Derives a child seed, for handing to APIs that take a plain `u64`.
pub fn derive_seed(seed: u64, tag: StreamTag, index: u32) -> u64 {
    substream(seed, tag, index).next_u64()
}
