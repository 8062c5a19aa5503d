//! Shared fixtures for the integration suites: a deterministic synthetic
//! image corpus with natural-image statistics (smooth, strongly correlated
//! neighbors, non-uniform histograms) and the frozen key set the acceptance
//! runs use.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use utccs::cipher::KeySet;
use utccs::ImageBuffer;

/// Sampling seed used by every seeded statistic in the acceptance suite.
pub const ACCEPT_SEED: u64 = 1;

/// Frozen keys for the acceptance runs. Magnitudes sit in [0.25, 1) so the
/// ulp-driven sensitivity thresholds stay within the expected band.
pub fn accept_keys() -> KeySet {
    KeySet::new(0.4584, 0.6541, 0.3619, 0.4508, 0.5874, 0.7391).unwrap()
}

/// Separable AR(1)xAR(1) Gaussian field quantized to 8 bits: lag-1
/// correlations ~rho_h horizontally and ~rho_v vertically, mean 128.
pub fn textured(seed: u64, rows: usize, cols: usize, rho_h: f64, rho_v: f64, gain: f64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sw = ((1.0 - rho_v * rho_v) * (1.0 - rho_h * rho_h)).sqrt();
    let mut field = vec![0f64; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let up = if i > 0 { field[(i - 1) * cols + j] } else { 0.0 };
            let left = if j > 0 { field[i * cols + j - 1] } else { 0.0 };
            let diag = if i > 0 && j > 0 {
                field[(i - 1) * cols + j - 1]
            } else {
                0.0
            };
            let w: f64 = rng.sample(StandardNormal);
            field[i * cols + j] = rho_v * up + rho_h * left - rho_v * rho_h * diag + sw * w;
        }
    }
    let px = field
        .iter()
        .map(|&u| (128.0 + gain * u).clamp(0.0, 255.0) as u8)
        .collect();
    ImageBuffer::from_pixels(rows, cols, px).unwrap()
}

/// The stand-in for the classic 256x256 portrait test image: tuned so the
/// horizontal adjacent-pixel correlation lands at ~0.973 under the
/// acceptance sampler.
pub fn lena_like() -> ImageBuffer {
    textured(7, 256, 256, 0.966, 0.962, 42.0)
}

/// Four 256x256 grayscale test images with distinct textures and
/// conspicuously non-uniform histograms.
pub fn corpus4() -> Vec<(&'static str, ImageBuffer)> {
    vec![
        ("portrait", lena_like()),
        ("grainy", textured(20, 256, 256, 0.9, 0.85, 55.0)),
        ("vertical-streaks", textured(21, 256, 256, 0.5, 0.99, 60.0)),
        ("horizontal-streaks", textured(22, 256, 256, 0.99, 0.5, 35.0)),
    ]
}

/// Uniform random image, seeded.
pub fn random_image(seed: u64, rows: usize, cols: usize) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ImageBuffer::from_pixels(rows, cols, (0..rows * cols).map(|_| rng.gen()).collect()).unwrap()
}

/// Random keys strictly inside (0.05, 0.95), seeded.
pub fn random_keys(seed: u64) -> KeySet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = || rng.gen_range(0.05..0.95);
    KeySet::new(k(), k(), k(), k(), k(), k()).unwrap()
}
