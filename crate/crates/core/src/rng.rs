//! Seed-derived random streams.
//!
//! Every unit of augmentation work (one source image copy, or one image in
//! one epoch) draws from its own ChaCha8 stream, selected by a stream id
//! under a key derived from the run seed. Work can therefore be processed
//! in any order or on any number of threads and still replay bit-exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates augmentation streams from the sketch-matrix stream, which is
/// keyed by the raw seed.
const AUGMENT_KEY: u64 = 0x6c6f_636f_6d70_0001;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ AUGMENT_KEY);
    rng.set_stream(stream);
    rng
}

/// Stream id for copy `copy` of source `index` in default mode.
pub fn default_stream(index: usize, copies: usize, copy: usize) -> u64 {
    (index * copies + copy) as u64
}

/// Stream id for source `index` in epoch `epoch` of an inline run. The top
/// bit keeps these disjoint from default-mode streams.
pub fn inline_stream(epoch: usize, index: usize, sources: usize) -> u64 {
    (1u64 << 63) | (epoch * sources + index) as u64
}
