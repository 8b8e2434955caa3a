//! Deterministic random streams.
//!
//! Every replication owns a seed `seed_base ^ replication`; each consumer
//! inside the episode (environment noise, policy randomization) reads its own
//! ChaCha stream under that seed, so streams never overlap and the schedule
//! of worker threads has no effect on any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose of a random stream within one episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Environment = 0,
    Policy = 1,
}

/// Seed for a given replication.
pub fn replication_seed(seed_base: u64, replication: u64) -> u64 {
    seed_base ^ replication
}

/// The generator for `purpose` under `seed`.
pub fn stream(seed: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}
