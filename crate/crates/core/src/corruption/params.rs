use serde::{Deserialize, Serialize};

use super::CorruptionError;
use crate::spec::Intensity;

/// One value per weather intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerIntensity<T> {
    pub low: T,
    pub medium: T,
    pub high: T,
}

impl<T> PerIntensity<T> {
    pub fn get(&self, i: Intensity) -> &T {
        match i {
            Intensity::Low => &self.low,
            Intensity::Medium => &self.medium,
            Intensity::High => &self.high,
        }
    }

    pub fn get_mut(&mut self, i: Intensity) -> &mut T {
        match i {
            Intensity::Low => &mut self.low,
            Intensity::Medium => &mut self.medium,
            Intensity::High => &mut self.high,
        }
    }

    fn iter(&self) -> impl Iterator<Item = &T> {
        [&self.low, &self.medium, &self.high].into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FogParams {
    /// Blend factor toward white, in `[0, 1]`.
    pub alpha: f64,
    /// Gaussian blur sigma in pixels.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunflareParams {
    /// Disc radius as a fraction of the image diagonal.
    pub radius_fraction: f64,
    /// Additive brightness at the flare center, in channel units.
    pub gain: f64,
    pub halo_count: u32,
    /// Fixed flare center as fractions of (width, height); `None` draws it
    /// from the seeded rng inside the top third of the image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<(f64, f64)>,
}

/// Numeric severity table for every corruption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionParams {
    /// Noise sigma (channel units) per degree.
    pub noise_sigma_per_degree: f64,
    /// Blur sigma (pixels) per degree.
    pub blur_sigma_per_degree: f64,
    /// Fraction of pixels whitened by snow.
    pub snow: PerIntensity<f64>,
    pub fog: PerIntensity<FogParams>,
    pub sunflare: PerIntensity<SunflareParams>,
}

impl Default for CorruptionParams {
    fn default() -> Self {
        let flare = |radius_fraction, gain, halo_count| SunflareParams {
            radius_fraction,
            gain,
            halo_count,
            center: None,
        };
        Self {
            noise_sigma_per_degree: 10.0,
            blur_sigma_per_degree: 1.0,
            snow: PerIntensity {
                low: 0.03,
                medium: 0.08,
                high: 0.15,
            },
            fog: PerIntensity {
                low: FogParams {
                    alpha: 0.10,
                    sigma: 1.0,
                },
                medium: FogParams {
                    alpha: 0.25,
                    sigma: 2.5,
                },
                high: FogParams {
                    alpha: 0.40,
                    sigma: 5.0,
                },
            },
            sunflare: PerIntensity {
                low: flare(0.05, 120.0, 4),
                medium: flare(0.10, 180.0, 6),
                high: flare(0.18, 255.0, 8),
            },
        }
    }
}

impl CorruptionParams {
    /// Fog as pure blur: white blending disabled at every intensity.
    pub fn strict_fog(mut self) -> Self {
        for i in Intensity::ALL {
            self.fog.get_mut(i).alpha = 0.0;
        }
        self
    }

    pub fn validate(&self) -> Result<(), CorruptionError> {
        let bad = |what: &'static str, v: f64| CorruptionError::InvalidParams { what, value: v };
        let non_negative = |what, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(bad(what, v))
            }
        };
        let fraction = |what, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(bad(what, v))
            }
        };
        non_negative("noise_sigma_per_degree", self.noise_sigma_per_degree)?;
        non_negative("blur_sigma_per_degree", self.blur_sigma_per_degree)?;
        for &p in self.snow.iter() {
            fraction("snow fraction", p)?;
        }
        for f in self.fog.iter() {
            fraction("fog alpha", f.alpha)?;
            non_negative("fog sigma", f.sigma)?;
        }
        for s in self.sunflare.iter() {
            fraction("sunflare radius_fraction", s.radius_fraction)?;
            non_negative("sunflare gain", s.gain)?;
            if let Some((x, y)) = s.center {
                fraction("sunflare center x", x)?;
                fraction("sunflare center y", y)?;
            }
        }
        Ok(())
    }
}
