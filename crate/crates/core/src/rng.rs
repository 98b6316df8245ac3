//! Seed splitting: every consumer gets its own ChaCha stream of one seed,
//! so results do not depend on how work is divided between threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
