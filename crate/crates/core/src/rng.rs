//! Deterministic randomness for probe sampling.
//!
//! Every random draw in the crate comes from a SplitMix64 stream keyed by a
//! single 64-bit seed, so experiments replay bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub type LabRng = SplitMix64;

pub fn seeded(seed: u64) -> LabRng {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform sample in `[lo, hi)`.
pub fn uniform(rng: &mut LabRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut LabRng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
