//! Raster files: binary PPM (P6, maxval 255) and 8-bit RGB PNG.

use std::io::Cursor;
use std::path::Path;

use credence_core::Raster;

use crate::error::ImageError;

/// Largest accepted pixel count (256 Mpx).
pub const MAX_PIXELS: u64 = 1 << 28;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "ppm" | "pnm" => Some(ImageFormat::Ppm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }
}

pub fn read_image(path: &Path) -> Result<Raster, ImageError> {
    decode_image(&std::fs::read(path)?)
}

pub fn write_image(raster: &Raster, path: &Path) -> Result<(), ImageError> {
    let format = ImageFormat::from_path(path)
        .ok_or_else(|| ImageError::Unsupported(Some(path.display().to_string())))?;
    std::fs::write(path, encode_image(raster, format)?)?;
    Ok(())
}

/// Decodes by magic bytes.
pub fn decode_image(bytes: &[u8]) -> Result<Raster, ImageError> {
    if bytes.len() < 2 {
        return Err(ImageError::Truncated);
    }
    if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if PNG_MAGIC.starts_with(bytes) {
        Err(ImageError::Truncated)
    } else {
        Err(ImageError::Unsupported(None))
    }
}

pub fn encode_image(raster: &Raster, format: ImageFormat) -> Result<Vec<u8>, ImageError> {
    match format {
        ImageFormat::Ppm => Ok(encode_ppm(raster)),
        ImageFormat::Png => encode_png(raster),
    }
}

pub fn encode_ppm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width(), raster.height()).into_bytes();
    out.extend(raster.to_rgb_bytes());
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.bytes.len() {
                ImageError::Truncated
            } else {
                ImageError::Header(format!("expected {what}"))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Header(format!("{what} out of range")))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<Raster, ImageError> {
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(Some(format!("PPM maxval {maxval}"))));
    }
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        Some(_) => return Err(ImageError::Header("missing separator after maxval".into())),
        None => return Err(ImageError::Truncated),
    }
    let (w, ht) = checked_dims(width, height)?;
    let need = (width * height * 3) as usize;
    let data = &bytes[h.pos..];
    if data.len() < need {
        return Err(ImageError::Truncated);
    }
    Ok(Raster::from_rgb_bytes(w, ht, &data[..need])?)
}

fn checked_dims(width: u64, height: u64) -> Result<(u32, u32), ImageError> {
    let overflow = ImageError::DimensionOverflow { width, height };
    let w = u32::try_from(width).map_err(|_| ImageError::DimensionOverflow { width, height })?;
    let h = u32::try_from(height).map_err(|_| ImageError::DimensionOverflow { width, height })?;
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS => {}
        _ => return Err(overflow),
    }
    if w == 0 || h == 0 {
        return Err(ImageError::Header(format!("zero dimension {width}x{height}")));
    }
    Ok((w, h))
}

fn decode_png(bytes: &[u8]) -> Result<Raster, ImageError> {
    let reader = image::ImageReader::with_format(Cursor::new(bytes), image::ImageFormat::Png);
    let img = reader.decode().map_err(|e| match e {
        image::ImageError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            ImageError::Truncated
        }
        other => ImageError::Codec(other.to_string()),
    })?;
    let (w, h) = (img.width() as u64, img.height() as u64);
    checked_dims(w, h)?;
    let rgb = img.into_rgb8();
    Ok(Raster::from_rgb_bytes(rgb.width(), rgb.height(), rgb.as_raw())?)
}

fn encode_png(raster: &Raster) -> Result<Vec<u8>, ImageError> {
    let buf = image::RgbImage::from_raw(raster.width(), raster.height(), raster.to_rgb_bytes())
        .expect("raster invariants guarantee buffer size");
    let mut out = Vec::new();
    buf.write_to(&mut Cursor::new(&mut out), image::ImageFormat::Png)
        .map_err(|e| ImageError::Codec(e.to_string()))?;
    Ok(out)
}
