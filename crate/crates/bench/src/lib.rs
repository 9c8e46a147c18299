//! Deterministic inputs shared by the benchmarks.

use rand::Rng;
use radiomics_crbm::rng::derived_rng;
use radiomics_crbm::{Image2D, RoiMask};

pub fn noise_image(side: usize, seed: u64) -> Image2D {
    let mut rng = derived_rng(seed, "bench-image", side as u64);
    let px = (0..side * side).map(|_| rng.random::<f64>()).collect();
    Image2D::new(side, side, px).expect("pixels in [0,1)")
}

pub fn full_mask(side: usize) -> RoiMask {
    RoiMask::full(side, side).expect("non-empty side")
}

/// Scores with ties and labels with both classes.
pub fn scores_and_labels(n: usize, seed: u64) -> (Vec<f64>, Vec<u8>) {
    let mut rng = derived_rng(seed, "bench-scores", n as u64);
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let scores = labels
        .iter()
        .map(|&l| ((rng.random::<f64>() + 0.3 * f64::from(l)) * 50.0).round() / 50.0)
        .collect();
    (scores, labels)
}
