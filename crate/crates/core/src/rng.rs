// SPDX-License-Identifier: MIT OR Apache-2.0

//! Counter-based random streams for reproducible parallel simulation.
//!
//! Replication `i` of an experiment draws from a ChaCha stream keyed by the
//! master seed with stream index `i`, so its noise sequence is identical
//! whether replications run serially or on any number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent stream for one replication of an experiment.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

/// Derives a sub-experiment seed from a master seed and a fixed tag, so
/// distinct phases (e.g. a calibration search and its confirmation run) use
/// unrelated stream families.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(tag))
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One standard-normal draw.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
