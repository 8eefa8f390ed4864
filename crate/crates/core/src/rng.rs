//! Seeded, stream-separated random number generation.
//!
//! Each unit of parallel work (an MC shard, a dataset point) gets its own
//! ChaCha stream derived from `(seed, stream)`, so results do not depend on how
//! work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
