//! Seeded, deterministic image corruptions at parametric severity.

mod blur;
mod fog;
mod noise;
mod params;
mod snow;
mod sunflare;

use alloc::vec::Vec;
use thiserror::Error;

pub use blur::{blur_with_sigma, gaussian_blur, gaussian_kernel};
pub use fog::fog_with;
pub use noise::{gaussian_noise, noise_with_sigma};
pub use params::{CorruptionParams, FogParams, PerIntensity, SunflareParams};
pub use snow::{snow_pixel_count, snow_with_fraction};
pub use sunflare::sunflare_with;

use crate::raster::{quantize, Raster};
use crate::rng::Rng;
use crate::spec::{CorruptionKind, CorruptionSpec, Intensity, Level};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorruptionError {
    #[error("invalid corruption parameter {what}: {value}")]
    InvalidParams { what: &'static str, value: f64 },
}

pub(crate) fn to_plane(img: &Raster) -> Vec<[f64; 3]> {
    img.pixels()
        .iter()
        .map(|p| [p[0] as f64, p[1] as f64, p[2] as f64])
        .collect()
}

pub(crate) fn from_plane(img: &Raster, plane: &[[f64; 3]]) -> Raster {
    let mut out = img.clone();
    for (dst, src) in out.pixels_mut().iter_mut().zip(plane) {
        *dst = [quantize(src[0]), quantize(src[1]), quantize(src[2])];
    }
    out
}

pub fn snow(img: &Raster, intensity: Intensity, params: &CorruptionParams, rng: &mut Rng) -> Raster {
    snow_with_fraction(img, *params.snow.get(intensity), rng)
}

/// Fog consumes no randomness; the rng is accepted for interface uniformity.
pub fn fog(img: &Raster, intensity: Intensity, params: &CorruptionParams, _rng: &mut Rng) -> Raster {
    fog_with(img, *params.fog.get(intensity))
}

pub fn sunflare(
    img: &Raster,
    intensity: Intensity,
    params: &CorruptionParams,
    rng: &mut Rng,
) -> Raster {
    sunflare_with(img, *params.sunflare.get(intensity), rng)
}

/// Applies `spec` with an rng seeded from `spec.seed()`.
pub fn apply(
    img: &Raster,
    spec: &CorruptionSpec,
    params: &CorruptionParams,
) -> Result<Raster, CorruptionError> {
    params.validate()?;
    let mut rng = Rng::seed_from_u64(spec.seed());
    let out = match (spec.kind(), spec.level()) {
        (CorruptionKind::GaussianNoise, Level::Degree(d)) => {
            gaussian_noise(img, d, params.noise_sigma_per_degree, &mut rng)
        }
        (CorruptionKind::GaussianBlur, Level::Degree(d)) => {
            gaussian_blur(img, d, params.blur_sigma_per_degree, &mut rng)
        }
        (CorruptionKind::Snow, Level::Intensity(i)) => snow(img, i, params, &mut rng),
        (CorruptionKind::Fog, Level::Intensity(i)) => fog(img, i, params, &mut rng),
        (CorruptionKind::Sunflare, Level::Intensity(i)) => sunflare(img, i, params, &mut rng),
        _ => unreachable!("CorruptionSpec construction rejects kind/level mismatches"),
    };
    Ok(out)
}
