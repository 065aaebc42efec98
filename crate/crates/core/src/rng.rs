//! The one random generator used everywhere.
//!
//! ChaCha8 is portable and fully specified, so a seed reproduces the same
//! problem files on every platform.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng64;

pub fn seeded(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}
