//! Deterministic random number generation.
//!
//! ChaCha8 seeded from a `u64` is the only randomness source in the
//! workspace; identical seeds give identical streams on every platform.

use rand_core::RngCore;

/// The deterministic RNG used throughout the workspace.
pub type DetRng = rand_chacha::ChaCha8Rng;

/// Creates an RNG from a bare seed.
pub fn rng_from_seed(seed: u64) -> DetRng {
    rand_core::SeedableRng::seed_from_u64(seed)
}

/// Creates an RNG for substream `stream` of `seed` (e.g. one k-means
/// restart), decorrelated from neighboring streams by a splitmix64 step.
pub fn substream(seed: u64, stream: u64) -> DetRng {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    rng_from_seed(z ^ (z >> 31))
}

/// Uniform draw from [0, 1) with 53 bits of precision.
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from 0..n. The modulo bias is below 2^-11 for any n that
/// fits in memory-sized collections, far below what clustering can resolve;
/// determinism is what matters here.
pub fn uniform_below(rng: &mut impl RngCore, n: usize) -> usize {
    debug_assert!(n > 0);
    (rng.next_u64() % n as u64) as usize
}
