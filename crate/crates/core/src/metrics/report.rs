use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{
    average_confidence, average_precision, cmap, mcmap, mean_ap, misclassification_error,
    MetricError,
};
use crate::class::{ClassId, ClassRegistry};
use crate::detection::{Detection, GroundTruthBox};
use crate::matching::{confusion_counts, match_detections, Counts};
use crate::spec::{CellKey, CorruptionKind, Intensity, Level};

/// Predictions and ground truth for one image of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEval {
    pub image_id: String,
    pub predictions: Vec<Detection>,
    pub truth: Vec<GroundTruthBox>,
}

/// Metrics for one (corruption, level) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub cell: CellKey,
    pub images: usize,
    /// Classes with at least one ground-truth instance.
    pub per_class_ap: BTreeMap<ClassId, f64>,
    /// Registry classes with no ground truth in this cell, left out of `map`.
    pub excluded_classes: Vec<ClassId>,
    pub map: Option<f64>,
    pub avg_confidence: Option<f64>,
    pub counts: Counts,
    pub misclassification_error: Option<f64>,
}

fn check_classes(images: &[ImageEval], registry: &ClassRegistry) -> Result<(), MetricError> {
    for im in images {
        let classes = im
            .predictions
            .iter()
            .map(|d| d.class())
            .chain(im.truth.iter().map(|t| &t.class));
        for c in classes {
            if !registry.contains(c) {
                return Err(MetricError::UnknownClass {
                    image_id: im.image_id.clone(),
                    class: c.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Evaluates one cell. Images are processed in image-id order so every
/// floating-point reduction is reproducible.
pub fn evaluate_cell(
    cell: CellKey,
    images: &[ImageEval],
    registry: &ClassRegistry,
    iou_threshold: f64,
) -> Result<EvaluationReport, MetricError> {
    check_classes(images, registry)?;
    let mut sorted: Vec<&ImageEval> = images.iter().collect();
    sorted.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let sorted: Vec<ImageEval> = sorted.into_iter().cloned().collect();

    let mut per_class_ap = BTreeMap::new();
    let mut excluded_classes = Vec::new();
    for class in registry.classes() {
        match average_precision(&class, &sorted, iou_threshold) {
            Ok(ap) => {
                per_class_ap.insert(class, ap);
            }
            Err(MetricError::NoGroundTruth(c)) => excluded_classes.push(c),
            Err(e) => return Err(e),
        }
    }
    // Registry order, not name order, for the mean.
    let map = mean_ap(registry.classes().filter_map(|c| per_class_ap.get(&c).copied())).ok();

    let counts: Counts = sorted
        .iter()
        .map(|im| confusion_counts(&match_detections(&im.predictions, &im.truth, iou_threshold)))
        .sum();

    Ok(EvaluationReport {
        cell,
        images: sorted.len(),
        per_class_ap,
        excluded_classes,
        map,
        avg_confidence: average_confidence(sorted.iter().flat_map(|im| &im.predictions)).ok(),
        counts,
        misclassification_error: misclassification_error(counts).ok(),
    })
}

/// Cross-cell scores over the weather grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    /// CmAP for every weather corruption whose three cells all have an mAP.
    pub cmap: BTreeMap<CorruptionKind, f64>,
    pub mcmap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flip_probability: Option<f64>,
    /// Weather cells that are missing or have no defined mAP.
    pub incomplete: Vec<CellKey>,
}

impl AggregateReport {
    pub fn is_complete(&self) -> bool {
        self.incomplete.is_empty()
    }
}

/// Computes CmAP per weather corruption and MCmAP from per-cell reports.
/// The first report wins when a cell appears twice.
pub fn aggregate(reports: &[EvaluationReport]) -> AggregateReport {
    let mut by_cell: BTreeMap<CellKey, Option<f64>> = BTreeMap::new();
    for r in reports {
        by_cell.entry(r.cell).or_insert(r.map);
    }
    let mut out = AggregateReport::default();
    let mut cmaps = Vec::new();
    for kind in CorruptionKind::WEATHER {
        let mut maps = Vec::new();
        for i in Intensity::ALL {
            let key = CellKey::Corrupted {
                kind,
                level: Level::Intensity(i),
            };
            match by_cell.get(&key).copied().flatten() {
                Some(m) => maps.push((i, m)),
                None => out.incomplete.push(key),
            }
        }
        if let Ok(c) = cmap(&maps) {
            out.cmap.insert(kind, c);
            cmaps.push((kind, c));
        }
    }
    out.mcmap = mcmap(&cmaps).ok();
    out
}
