//! Pinned random number generation.
//!
//! Every sampler in the crate draws from [`Xoshiro256PlusPlus`] seeded with
//! `seed_from_u64` (SplitMix64 expansion of the 64-bit seed). Trial `i` of an
//! experiment with master seed `s` uses [`trial_seed`]`(s, i)`. Bounded
//! integers go through [`bounded`] so results do not depend on the sampling
//! internals of any particular `rand` release.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

pub const RNG_NAME: &str = "xoshiro256++/splitmix64-seeded";
pub const STREAM_SPLIT_RULE: &str = "trial_seed = mix64(master ^ mix64(trial + 0x9e3779b97f4a7c15))";

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of an experiment. Injective in `trial` for a fixed master.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix64(master ^ mix64(trial.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

/// Uniform integer in `0..bound` (Lemire's widening-multiply rejection method).
pub fn bounded(rng: &mut Rng, bound: u64) -> u64 {
    assert!(bound > 0);
    let mut m = (rng.next_u64() as u128) * (bound as u128);
    if (m as u64) < bound {
        let threshold = bound.wrapping_neg() % bound;
        while (m as u64) < threshold {
            m = (rng.next_u64() as u128) * (bound as u128);
        }
    }
    (m >> 64) as u64
}

/// Uniform real in `[0, 1)` with 53 random bits.
pub fn unit_f64(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_pinned() {
        // Frozen first outputs; a change here breaks replayability of every
        // recorded experiment.
        let mut r = rng_from_seed(0);
        let first: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        let mut again = rng_from_seed(0);
        assert_eq!(first, (0..3).map(|_| again.next_u64()).collect::<Vec<_>>());
        assert_eq!(first, FROZEN_SEED0.to_vec());
    }

    const FROZEN_SEED0: [u64; 3] = [0x53175d61490b23df, 0x61da6f3dc380d507, 0x5c0fdf91ec9a7bfc];

    #[test]
    fn trial_seeds_distinct() {
        let mut seeds: Vec<u64> = (0..10_000).map(|t| trial_seed(42, t)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 10_000);
    }

    #[test]
    fn bounded_is_uniform_enough() {
        let mut r = rng_from_seed(7);
        let mut counts = [0u32; 6];
        for _ in 0..60_000 {
            counts[bounded(&mut r, 6) as usize] += 1;
        }
        for c in counts {
            assert!((c as i64 - 10_000).abs() < 400, "{counts:?}");
        }
        assert_eq!(bounded(&mut r, 1), 0);
    }
}
