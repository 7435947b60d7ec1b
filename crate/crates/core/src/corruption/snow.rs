use alloc::vec::Vec;

use crate::raster::{Raster, WHITE};
use crate::rng::Rng;

/// Number of pixels whitened for fraction `p` on a raster with `n` pixels.
pub fn snow_pixel_count(p: f64, n: usize) -> usize {
    (libm::floor(p * n as f64).max(0.0) as usize).min(n)
}

/// Whitens `floor(p * W * H)` distinct, uniformly chosen pixels.
///
/// Selection is a partial Fisher-Yates shuffle over pixel indices.
pub fn snow_with_fraction(img: &Raster, p: f64, rng: &mut Rng) -> Raster {
    let mut out = img.clone();
    let n = out.len();
    let count = snow_pixel_count(p, n);
    if count == 0 {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let pixels = out.pixels_mut();
    for i in 0..count {
        let j = i + rng.below((n - i) as u64) as usize;
        idx.swap(i, j);
        pixels[idx[i]] = WHITE;
    }
    out
}
