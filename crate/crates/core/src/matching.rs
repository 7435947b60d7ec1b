//! Greedy assignment of predictions to ground truth and the resulting
//! confusion counts.
//!
//! Matching is class-agnostic: a localized but mislabeled detection still
//! pairs with its object, and the label mismatch is recorded on the pair.
//! This keeps misclassifications and label flips observable.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::detection::{Detection, GroundTruthBox};
use crate::geometry::iou;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub prediction: usize,
    pub truth: usize,
    pub iou: f64,
    pub label_correct: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// In the order predictions claimed their boxes.
    pub pairs: Vec<MatchPair>,
    /// False positives, ascending index.
    pub unmatched_predictions: Vec<usize>,
    /// False negatives, ascending index.
    pub unmatched_ground_truth: Vec<usize>,
}

impl MatchResult {
    /// Index of the prediction matched to each ground-truth box.
    pub fn prediction_for_truth(&self, n_truth: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_truth];
        for p in &self.pairs {
            out[p.truth] = Some(p.prediction);
        }
        out
    }
}

/// Confusion counts. `tn` is always zero: open-scene detection has no
/// finite set of true negatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl core::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl core::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

/// Prediction indices by descending confidence; ties keep file order.
pub fn confidence_order(predictions: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    order.sort_by(|&a, &b| {
        predictions[b]
            .confidence()
            .total_cmp(&predictions[a].confidence())
    });
    order
}

/// Greedy matching in confidence order.
///
/// Each prediction claims the unclaimed ground-truth box with the highest
/// IoU at or above `iou_threshold`; equal IoUs go to the lowest
/// ground-truth index.
pub fn match_detections(
    predictions: &[Detection],
    truth: &[GroundTruthBox],
    iou_threshold: f64,
) -> MatchResult {
    let mut claimed = vec![false; truth.len()];
    let mut matched_pred = vec![false; predictions.len()];
    let mut pairs = Vec::new();

    for p in confidence_order(predictions) {
        let det = &predictions[p];
        let mut best: Option<(usize, f64)> = None;
        for (t, gt) in truth.iter().enumerate() {
            if claimed[t] {
                continue;
            }
            let overlap = iou(det.bbox(), &gt.bbox);
            if overlap >= iou_threshold && best.is_none_or(|(_, b)| overlap > b) {
                best = Some((t, overlap));
            }
        }
        if let Some((t, overlap)) = best {
            claimed[t] = true;
            matched_pred[p] = true;
            pairs.push(MatchPair {
                prediction: p,
                truth: t,
                iou: overlap,
                label_correct: *det.class() == truth[t].class,
            });
        }
    }

    MatchResult {
        pairs,
        unmatched_predictions: (0..predictions.len())
            .filter(|&i| !matched_pred[i])
            .collect(),
        unmatched_ground_truth: (0..truth.len()).filter(|&i| !claimed[i]).collect(),
    }
}

/// TP = correctly labeled pairs; FP = unmatched predictions plus mislabeled
/// pairs; FN = unmatched ground truth; TN = 0.
pub fn confusion_counts(m: &MatchResult) -> Counts {
    let correct = m.pairs.iter().filter(|p| p.label_correct).count() as u64;
    let wrong = m.pairs.len() as u64 - correct;
    Counts {
        tp: correct,
        tn: 0,
        fp: m.unmatched_predictions.len() as u64 + wrong,
        fn_: m.unmatched_ground_truth.len() as u64,
    }
}
