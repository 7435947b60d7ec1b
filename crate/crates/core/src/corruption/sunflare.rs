use alloc::vec;

use super::params::SunflareParams;
use crate::raster::{quantize, Raster};
use crate::rng::Rng;

struct Light {
    cx: f64,
    cy: f64,
    radius: f64,
    strength: f64,
}

impl Light {
    /// Quadratic radial falloff: full strength at the center, zero at `radius`.
    fn at(&self, x: f64, y: f64) -> f64 {
        if self.radius <= 0.0 {
            return 0.0;
        }
        let (dx, dy) = (x - self.cx, y - self.cy);
        let q = (dx * dx + dy * dy) / (self.radius * self.radius);
        if q >= 1.0 {
            0.0
        } else {
            self.strength * (1.0 - q)
        }
    }
}

/// Additive lens flare: a bright disc plus `halo_count` translucent halos.
///
/// The disc is centered at `params.center` (fractions of width/height) or,
/// when unset, at a seeded position in the top third of the image. Halos
/// shrink as they step along the line from the flare through the image
/// center. Light adds equally to all channels and clamps at 255.
pub fn sunflare_with(img: &Raster, params: SunflareParams, rng: &mut Rng) -> Raster {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let (cx, cy) = match params.center {
        Some((fx, fy)) => (fx * w, fy * h),
        None => {
            let fx = rng.uniform();
            let fy = rng.uniform() / 3.0;
            (fx * w, fy * h)
        }
    };
    if params.gain <= 0.0 {
        return img.clone();
    }
    let radius = params.radius_fraction * libm::sqrt(w * w + h * h);
    let mut lights = vec![Light {
        cx,
        cy,
        radius,
        strength: params.gain,
    }];
    let (mx, my) = (w / 2.0, h / 2.0);
    let n = params.halo_count as f64;
    for k in 1..=params.halo_count {
        let k = k as f64;
        let t = 1.5 * k / n;
        lights.push(Light {
            cx: cx + t * (mx - cx),
            cy: cy + t * (my - cy),
            radius: 0.6 * radius * (1.0 - (k - 1.0) / n),
            strength: 0.2 * params.gain,
        });
    }

    let mut out = img.clone();
    let width = img.width() as usize;
    for (i, px) in out.pixels_mut().iter_mut().enumerate() {
        let (x, y) = ((i % width) as f64, (i / width) as f64);
        let add: f64 = lights.iter().map(|l| l.at(x, y)).sum();
        if add > 0.0 {
            for c in px.iter_mut() {
                *c = quantize(*c as f64 + add);
            }
        }
    }
    out
}
