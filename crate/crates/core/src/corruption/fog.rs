use super::blur::blur_plane;
use super::params::FogParams;
use super::{from_plane, to_plane};
use crate::raster::Raster;

/// Blends every pixel toward white by `alpha`, then blurs with `sigma`.
pub fn fog_with(img: &Raster, params: FogParams) -> Raster {
    let FogParams { alpha, sigma } = params;
    if alpha == 0.0 && sigma <= 0.0 {
        return img.clone();
    }
    let mut plane = to_plane(img);
    if alpha != 0.0 {
        for px in &mut plane {
            for c in px.iter_mut() {
                *c = (1.0 - alpha) * *c + alpha * 255.0;
            }
        }
    }
    blur_plane(
        &mut plane,
        img.width() as usize,
        img.height() as usize,
        sigma,
    );
    from_plane(img, &plane)
}
