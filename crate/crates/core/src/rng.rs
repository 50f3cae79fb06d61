//! Seeded randomness. Every random choice in the crate flows from a `u64` seed
//! through these helpers so runs are reproducible across platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StdRng = ChaCha8Rng;

pub fn rng(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a seed with a stage tag (splitmix64 finaliser).
pub fn derive(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive2(seed: u64, a: u64, b: u64) -> u64 {
    derive(derive(seed, a), b)
}

pub fn shuffled<T: Clone>(items: &[T], rng: &mut StdRng) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

/// Uniform `k`-subset of `items`, in the order drawn.
pub fn sample<T: Clone>(items: &[T], k: usize, rng: &mut StdRng) -> Vec<T> {
    let k = k.min(items.len());
    let mut v = items.to_vec();
    let (head, _) = v.partial_shuffle(rng, k);
    head.to_vec()
}

/// Uniform pick; the same as shuffling with the seed and taking the first entry.
pub fn pick<T: Copy>(items: &[T], rng: &mut StdRng) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.gen_range(0..items.len())])
    }
}
