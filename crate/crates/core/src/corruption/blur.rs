use alloc::vec;
use alloc::vec::Vec;

use super::{from_plane, to_plane};
use crate::raster::Raster;
use crate::rng::Rng;
use crate::spec::Degree;

/// Normalized 1-D Gaussian kernel with radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = libm::ceil(3.0 * sigma) as i64;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|x| libm::exp(-((x * x) as f64) / denom))
        .collect();
    let sum: f64 = k.iter().sum();
    for w in &mut k {
        *w /= sum;
    }
    k
}

/// Separable Gaussian convolution over a float plane with clamp-to-edge borders.
pub(crate) fn blur_plane(plane: &mut [[f64; 3]], width: usize, height: usize, sigma: f64) {
    if sigma <= 0.0 {
        return;
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as i64;
    let mut tmp = vec![[0.0f64; 3]; plane.len()];

    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = [0.0; 3];
            for (k, w) in kernel.iter().enumerate() {
                let sx = (x as i64 + k as i64 - radius).clamp(0, width as i64 - 1) as usize;
                for c in 0..3 {
                    acc[c] += w * row[sx][c];
                }
            }
            tmp[y * width + x] = acc;
        }
    }
    for y in 0..height {
        for x in 0..width {
            let mut acc = [0.0; 3];
            for (k, w) in kernel.iter().enumerate() {
                let sy = (y as i64 + k as i64 - radius).clamp(0, height as i64 - 1) as usize;
                for c in 0..3 {
                    acc[c] += w * tmp[sy * width + x][c];
                }
            }
            plane[y * width + x] = acc;
        }
    }
}

pub fn blur_with_sigma(img: &Raster, sigma: f64) -> Raster {
    if sigma <= 0.0 {
        return img.clone();
    }
    let mut plane = to_plane(img);
    blur_plane(
        &mut plane,
        img.width() as usize,
        img.height() as usize,
        sigma,
    );
    from_plane(img, &plane)
}

/// Gaussian blur with `sigma = sigma_per_degree * degree`. The rng is unused.
pub fn gaussian_blur(img: &Raster, degree: Degree, sigma_per_degree: f64, _rng: &mut Rng) -> Raster {
    blur_with_sigma(img, sigma_per_degree * degree.get() as f64)
}
