//! The credibility metric suite: average confidence, AP/mAP, CmAP, MCmAP,
//! misclassification error and flip probability.

mod ap;
mod confidence;
mod corruption_map;
mod flip;
mod misclassification;
mod report;

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

pub use ap::{ap_from_ranked, average_precision};
pub use confidence::average_confidence;
pub use corruption_map::{cmap, mcmap, mean_ap};
pub use flip::{flip_probability, flip_tally, FlipSequence, FlipTally};
pub use misclassification::misclassification_error;
pub use report::{aggregate, evaluate_cell, AggregateReport, EvaluationReport, ImageEval};

use crate::class::ClassId;
use crate::spec::{CorruptionKind, Intensity};

/// Metric failures. "Undefined" variants are distinct from a score of 0.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("average confidence undefined: no detections")]
    NoDetections,
    #[error("average precision undefined for class '{0}': no ground-truth instances")]
    NoGroundTruth(ClassId),
    #[error("mean AP undefined: no class with ground-truth instances")]
    NoScoredClasses,
    #[error("incomplete cell: intensity '{0}' missing")]
    MissingIntensity(Intensity),
    #[error("intensity '{0}' given more than once")]
    DuplicateIntensity(Intensity),
    #[error("incomplete run: corruption '{0}' missing")]
    MissingCorruption(CorruptionKind),
    #[error("corruption '{0}' given more than once")]
    DuplicateCorruption(CorruptionKind),
    #[error("'{0}' is not a weather corruption")]
    NotWeather(CorruptionKind),
    #[error("misclassification error undefined: all counts are zero")]
    ZeroDenominator,
    #[error("flip sequences need at least 2 frames, got {0}")]
    SequenceTooShort(usize),
    #[error("flip sequences have mixed lengths; offending image ids: {}", .0.join(", "))]
    RaggedSequences(Vec<String>),
    #[error("flip probability undefined: no ground-truth objects")]
    NoObjects,
    #[error("class '{class}' in image '{image_id}' is not in the class registry")]
    UnknownClass { image_id: String, class: ClassId },
}
