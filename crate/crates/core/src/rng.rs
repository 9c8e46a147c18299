//! Seed derivation.
//!
//! Every stochastic component receives its own stream derived from the
//! top-level seed, a component name and an index. The mixing is SplitMix64
//! over an FNV-1a hash of the name, so derived seeds are stable across
//! platforms and toolchain versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Seed for `component` instance `index` under the top-level `seed`.
pub fn derive_seed(seed: u64, component: &str, index: u64) -> u64 {
    let h = splitmix64(seed ^ fnv1a(component.as_bytes()));
    splitmix64(h ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, component: &str, index: u64) -> Rng {
    rng_from_seed(derive_seed(seed, component, index))
}
