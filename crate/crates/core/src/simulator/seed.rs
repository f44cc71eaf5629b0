use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

pub(crate) const TAG_CODEWORD: u64 = 0x636f_6465;
pub(crate) const TAG_NOISE: u64 = 0x6e6f_6973;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit mix of two words.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix(splitmix(a) ^ b.wrapping_mul(GAMMA).rotate_left(17))
}

/// Seed of trial `index` under `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    mix(base, index)
}

pub(crate) fn codeword_rng(seed: u64, user: usize, class: usize, w: u64) -> ChaCha8Rng {
    let s = mix(mix(mix(mix(seed, TAG_CODEWORD), user as u64), class as u64), w);
    ChaCha8Rng::seed_from_u64(s)
}

pub(crate) fn noise_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, TAG_NOISE))
}

/// Uniform variate in `[0, 1)` with 53 random bits.
pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
