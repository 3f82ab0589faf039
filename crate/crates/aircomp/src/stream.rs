//! Deterministic random-stream derivation and complex Gaussian sampling.
//!
//! Every stochastic component in the crate draws from a ChaCha stream derived
//! from a master seed plus integer tags (sweep value, realization index,
//! block index, ...). Derivation mixes each tag through a SplitMix64-style
//! avalanche and feeds the result into the ChaCha key schedule, so child
//! streams are statistically independent and reproducible under any
//! parallel execution order.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::C64;

pub type Stream = ChaCha12Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a list of tags into a single child seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master ^ 0x51d1_b2ab_cf05_a7d3;
    let mut acc = splitmix64(&mut state);
    for &t in tags {
        state ^= t;
        acc ^= splitmix64(&mut state).rotate_left(17);
    }
    acc
}

/// Derives an independent ChaCha stream from (master, tags).
pub fn derive_stream(master: u64, tags: &[u64]) -> Stream {
    let child = derive_seed(master, tags);
    let mut state = child;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// One draw from the standard circularly symmetric complex Gaussian CN(0, 1):
/// real and imaginary parts are independent N(0, 1/2).
pub fn standard_complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Vector with i.i.d. CN(0, 1) entries.
pub fn complex_gaussian_vector(rng: &mut impl Rng, len: usize) -> DVector<C64> {
    DVector::from_fn(len, |_, _| standard_complex_gaussian(rng))
}
