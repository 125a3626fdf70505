//! Seeded randomness.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), seeded
//! from a `u64`. Sub-streams for independent trials are derived in counter
//! mode: the master seed keys the generator and the trial index selects the
//! ChaCha stream, whose first output word becomes the trial seed. A trial's
//! seed therefore depends only on `(master, index)`, never on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for trial `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}
