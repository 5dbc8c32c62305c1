//! Seed derivation. Every episode seed is a hash of where the episode sits
//! in the run, so any single episode can be replayed on its own.

use xxhash_rust::xxh3::xxh3_64_with_seed;

/// Hashes `parts` (joined with a separator no part contains) under `run_seed`.
pub fn derive(run_seed: u64, parts: &[&str]) -> u64 {
    xxh3_64_with_seed(parts.join("\u{1f}").as_bytes(), run_seed)
}
