//! File formats, manifests, reports and command implementations for the
//! credence toolkit. The algorithms themselves live in `credence-core`.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod image_io;
pub mod labels;
pub mod manifest;
pub mod predictions;
pub mod report;

pub use error::{DatasetError, ImageError, LineError, LoadError, ManifestError, ParseError, ReportError};
pub use image_io::{read_image, write_image};
pub use labels::{parse_kitti_labels, parse_kitti_labels_bytes, write_kitti_labels};
pub use manifest::{load_flip_manifest, load_manifest, FlipManifest, RunManifest};
pub use predictions::{parse_predictions, parse_predictions_bytes, write_predictions, PredictionRecord, Provenance};
pub use report::{FlipReport, ReportDocument};
