//! Counter-based random substreams.
//!
//! Every Monte Carlo trial `t` draws from `substream(seed, t)`, so results
//! do not depend on thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent generator for stream `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on `(0, 1]`.
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
