use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::class::ClassId;
use crate::geometry::BBox;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionError {
    #[error("confidence {0} outside [0, 1]")]
    ConfidenceRange(f64),
}

/// An annotated object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthBox {
    pub class: ClassId,
    pub bbox: BBox,
}

impl GroundTruthBox {
    pub fn new(class: ClassId, bbox: BBox) -> Self {
        Self { class, bbox }
    }
}

/// A detector output: label, box and confidence as reported, never recalibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetection")]
pub struct Detection {
    class: ClassId,
    bbox: BBox,
    confidence: f64,
}

impl Detection {
    pub fn new(class: ClassId, bbox: BBox, confidence: f64) -> Result<Self, DetectionError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(DetectionError::ConfidenceRange(confidence));
        }
        Ok(Self {
            class,
            bbox,
            confidence,
        })
    }

    pub fn class(&self) -> &ClassId {
        &self.class
    }

    pub fn bbox(&self) -> &BBox {
        &self.bbox
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }
}

#[derive(Deserialize)]
struct RawDetection {
    class: ClassId,
    bbox: BBox,
    confidence: f64,
}

impl TryFrom<RawDetection> for Detection {
    type Error = DetectionError;

    fn try_from(r: RawDetection) -> Result<Self, Self::Error> {
        Detection::new(r.class, r.bbox, r.confidence)
    }
}
