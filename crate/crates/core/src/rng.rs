//! Counter-based RNG streams.
//!
//! Every independent unit of work (one meeting-time sample, one graph in a
//! sweep) draws from its own ChaCha8 stream selected by `(seed, stream)`, so
//! results do not depend on how work is scheduled across threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// RNG for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed, e.g. the graph seed for index `index` of a sweep.
///
/// `domain` separates unrelated uses of the same master seed.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ domain.rotate_left(32));
    rng.set_stream(index);
    rng.next_u64()
}
