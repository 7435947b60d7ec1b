//! Pure algorithmic core of the credence toolkit.
//!
//! Everything here is `no_std` + `alloc`: seeded image corruptions, greedy
//! detection matching, the credibility metric suite and a parametric mock
//! detector. File formats, manifests and the CLI live in the `credence` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod class;
pub mod corruption;
pub mod detection;
pub mod geometry;
pub mod matching;
pub mod metrics;
pub mod mock;
pub mod raster;
pub mod rng;
pub mod spec;

pub use class::{ClassError, ClassId, ClassRegistry};
pub use corruption::{apply, CorruptionError, CorruptionParams};
pub use detection::{Detection, DetectionError, GroundTruthBox};
pub use geometry::{iou, BBox, BoxError};
pub use matching::{confusion_counts, match_detections, Counts, MatchResult};
pub use metrics::{
    average_confidence, average_precision, cmap, flip_probability, mcmap, mean_ap,
    misclassification_error, AggregateReport, EvaluationReport, FlipSequence, ImageEval,
    MetricError,
};
pub use mock::{detect, DegradationProfile, ProfileError, SeverityMap};
pub use raster::{validate_raster, Raster, RasterError, Rgb};
pub use rng::Rng;
pub use spec::{CellKey, CorruptionKind, CorruptionSpec, Degree, Intensity, Level, SpecError};
