//! Deterministic seed derivation.
//!
//! Every randomized routine derives its generator from (master, trial, stage)
//! through a fixed-point mixing function, so adding or reordering stages never
//! perturbs other streams and trials can run on any worker in parallel.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named stream stages. Values are part of the reproducibility contract.
pub mod stage {
    pub const GRAPH: u64 = 1;
    pub const SOURCE: u64 = 2;
    pub const SPREAD: u64 = 3;
    pub const SPREAD_STEP: u64 = 4;
    pub const URN: u64 = 5;
}

/// splitmix64 finalizer; full-period bijection on u64.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive an independent seed for (master, trial, stage).
pub fn derive_seed(master: u64, trial: u64, stage: u64) -> u64 {
    let mut h = mix(master);
    h = mix(h ^ mix(trial.wrapping_add(0x5851f42d4c957f2d)));
    h = mix(h ^ mix(stage.wrapping_add(0x14057b7ef767814f)));
    h
}

/// ChaCha stream for (master, trial, stage).
pub fn rng_for(master: u64, trial: u64, stage: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, trial, stage))
}

/// ChaCha stream directly from a seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
