use crate::raster::{quantize, Raster};
use crate::rng::Rng;
use crate::spec::Degree;

/// Adds independent `Normal(0, sigma^2)` noise to every channel.
pub fn noise_with_sigma(img: &Raster, sigma: f64, rng: &mut Rng) -> Raster {
    let mut out = img.clone();
    if sigma <= 0.0 {
        return out;
    }
    for px in out.pixels_mut() {
        for c in px.iter_mut() {
            *c = quantize(*c as f64 + sigma * rng.standard_normal());
        }
    }
    out
}

/// Gaussian noise with `sigma = sigma_per_degree * degree`; degree 0 is a copy.
pub fn gaussian_noise(img: &Raster, degree: Degree, sigma_per_degree: f64, rng: &mut Rng) -> Raster {
    noise_with_sigma(img, sigma_per_degree * degree.get() as f64, rng)
}
