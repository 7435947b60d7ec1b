use std::fmt;
use std::path::PathBuf;

use credence_core::{BoxError, MetricError, RasterError};
use thiserror::Error;

/// What went wrong on one line of a text file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineError {
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: &'static str, found: usize },
    #[error("field {field}: '{text}' is not a finite number")]
    BadNumber { field: usize, text: String },
    #[error("invalid box: {0}")]
    InvalidBox(BoxError),
    #[error("confidence {0} outside [0, 1]")]
    ConfidenceRange(f64),
    #[error("unknown class '{0}'")]
    UnknownClass(String),
    #[error("invalid UTF-8")]
    Utf8,
    #[error("malformed provenance comment: {0}")]
    Provenance(String),
}

/// A parse failure located at a 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub line: usize,
    pub kind: LineError,
}

impl ParseError {
    pub fn new(line: usize, kind: LineError) -> Self {
        Self { line, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.kind)
    }
}

/// Decodes UTF-8, reporting the line of the first invalid byte.
pub(crate) fn decode_utf8(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError::new(line, LineError::Utf8)
    })
}

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("unsupported image format{}", .0.as_ref().map(|s| format!(": {s}")).unwrap_or_default())]
    Unsupported(Option<String>),
    #[error("truncated image data")]
    Truncated,
    #[error("image dimensions {width}x{height} too large")]
    DimensionOverflow { width: u64, height: u64 },
    #[error("malformed PPM header: {0}")]
    Header(String),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("PNG codec: {0}")]
    Codec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failure tied to a file on disk.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Image { path: PathBuf, source: ImageError },
    #[error("{}: missing prediction file for image '{image_id}'", .path.display())]
    MissingPredictions { path: PathBuf, image_id: String },
}

/// Manifest validation failure located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pointer}: {message}")]
pub struct ManifestError {
    pub pointer: String,
    pub message: String,
}

impl ManifestError {
    pub fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Invalid {
        path: PathBuf,
        source: ManifestError,
    },
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report schema version '{found}' is not supported (expected '{expected}')")]
    SchemaMismatch { found: String, expected: &'static str },
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
