//! Seeded random number generation shared by the samplers and generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator behind every seeded draw, recorded in reports.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}
