//! Seeded random streams.
//!
//! Every experiment derives its streams from a master seed and a counter, so
//! the number of worker threads never changes the drawn values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream `index` of the generator seeded by `master`.
pub fn stream(master: u64, index: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Seeded generator on stream zero.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
