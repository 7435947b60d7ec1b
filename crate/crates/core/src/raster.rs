use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// One RGB pixel. `u8` channels make out-of-range values unrepresentable.
pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RasterError {
    #[error("raster dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: u32, height: u32 },
    #[error("pixel count {actual} does not match {width}x{height} = {expected}")]
    PixelCount {
        width: u32,
        height: u32,
        expected: u64,
        actual: usize,
    },
    #[error("channel value {value} at pixel {index} outside [0, 255]")]
    ChannelRange { index: usize, value: i64 },
}

/// Row-major, 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

/// Checks raster invariants on raw parts and reports the first violation.
pub fn validate_raster(width: u32, height: u32, pixels: &[Rgb]) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension { width, height });
    }
    let expected = width as u64 * height as u64;
    if pixels.len() as u64 != expected {
        return Err(RasterError::PixelCount {
            width,
            height,
            expected,
            actual: pixels.len(),
        });
    }
    Ok(())
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, RasterError> {
        validate_raster(width, height, &pixels)?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, color: Rgb) -> Result<Self, RasterError> {
        let n = width as usize * height as usize;
        Self::new(width, height, vec![color; n])
    }

    /// Builds a raster from wide integer channels, rejecting values outside `[0, 255]`.
    pub fn from_channels(width: u32, height: u32, channels: &[i64]) -> Result<Self, RasterError> {
        let mut pixels = Vec::with_capacity(channels.len() / 3);
        for (i, c) in channels.chunks(3).enumerate() {
            let mut px = [0u8; 3];
            for (k, &v) in c.iter().enumerate() {
                px[k] = u8::try_from(v).map_err(|_| RasterError::ChannelRange {
                    index: i,
                    value: v,
                })?;
            }
            if c.len() != 3 {
                return Err(RasterError::PixelCount {
                    width,
                    height,
                    expected: width as u64 * height as u64,
                    actual: i,
                });
            }
            pixels.push(px);
        }
        Self::new(width, height, pixels)
    }

    /// Builds a raster from interleaved RGB bytes.
    pub fn from_rgb_bytes(width: u32, height: u32, bytes: &[u8]) -> Result<Self, RasterError> {
        if !bytes.len().is_multiple_of(3) {
            return Err(RasterError::PixelCount {
                width,
                height,
                expected: width as u64 * height as u64,
                actual: bytes.len() / 3,
            });
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> Option<Rgb> {
        if x < self.width && y < self.height {
            Some(self.pixels[y as usize * self.width as usize + x as usize])
        } else {
            None
        }
    }

    pub fn set(&mut self, x: u32, y: u32, px: Rgb) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = px;
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.pixels
    }
}

/// Rounds half away from zero and clamps into a channel value.
pub(crate) fn quantize(v: f64) -> u8 {
    let r = libm::round(v);
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}
