//! Shared input generators for the benchmarks.

use halftone_core::{GrayImage, SignedImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_signed(side: usize, seed: u64) -> SignedImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..side * side)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    SignedImage::new(side, side, values).unwrap()
}

pub fn random_gray(side: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..side * side).map(|_| rng.gen_range(0.0..=1.0)).collect();
    GrayImage::new(side, side, values).unwrap()
}
