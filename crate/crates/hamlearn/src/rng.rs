//! Seeded RNG streams.
//!
//! Every stochastic routine draws from a ChaCha stream derived from a master
//! seed and a stream index. Tasks that may run in any order (per-term shot
//! estimates, per-sample evaluations) each get their own substream, so
//! results do not depend on execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Master stream for a seed (stream index 0).
pub fn master(seed: u64) -> Stream {
    substream(seed, 0)
}

/// Independent stream `index` of the generator seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
