//! Seeded randomness helpers.
//!
//! Everything random in this crate flows through a root `u64` seed. Parallel
//! or per-draw work derives independent child seeds with a splitmix64 hash of
//! (root, index), so results never depend on scheduling or iteration order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a root seed with a stream index into an independent child seed.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream cipher RNG for a (root, stream) pair.
pub fn stream(root: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, index))
}

/// One standard-normal draw via Box-Muller (no rejection, so the number of
/// uniforms consumed per draw is fixed and streams stay aligned).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Fills a buffer with independent standard-normal draws.
pub fn fill_standard_normal<R: Rng>(rng: &mut R, buf: &mut [f64]) {
    for v in buf {
        *v = standard_normal(rng);
    }
}
