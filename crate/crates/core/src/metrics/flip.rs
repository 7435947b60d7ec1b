use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::class::ClassId;
use crate::detection::{Detection, GroundTruthBox};
use crate::matching::match_detections;

/// One image's predictions across increasingly perturbed copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipSequence {
    pub image_id: String,
    pub truth: Vec<GroundTruthBox>,
    /// `frames[j]` holds the predictions on the j-th perturbed copy.
    pub frames: Vec<Vec<Detection>>,
}

impl FlipSequence {
    /// Label assigned to each ground-truth object in `frame`: the class of
    /// its matched prediction, or `None` when unmatched.
    pub fn frame_labels(&self, frame: usize, iou_threshold: f64) -> Vec<Option<ClassId>> {
        let preds = &self.frames[frame];
        let m = match_detections(preds, &self.truth, iou_threshold);
        m.prediction_for_truth(self.truth.len())
            .into_iter()
            .map(|p| p.map(|p| preds[p].class().clone()))
            .collect()
    }
}

/// Raw flip counts, poolable across cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipTally {
    pub flips: u64,
    pub transitions: u64,
    pub objects: u64,
    pub sequences: u64,
}

impl FlipTally {
    pub fn probability(&self) -> Result<f64, MetricError> {
        if self.transitions == 0 {
            Err(MetricError::NoObjects)
        } else {
            Ok(self.flips as f64 / self.transitions as f64)
        }
    }

    pub fn merge(self, o: FlipTally) -> FlipTally {
        FlipTally {
            flips: self.flips + o.flips,
            transitions: self.transitions + o.transitions,
            objects: self.objects + o.objects,
            sequences: self.sequences + o.sequences,
        }
    }
}

/// Checks that all sequences share one length `n >= 2` and returns it.
fn common_length(sequences: &[FlipSequence]) -> Result<Option<usize>, MetricError> {
    let mut by_len: BTreeMap<usize, usize> = BTreeMap::new();
    for s in sequences {
        *by_len.entry(s.frames.len()).or_default() += 1;
    }
    let Some((&n, _)) = by_len.iter().max_by_key(|(len, count)| (**count, **len)) else {
        return Ok(None);
    };
    if by_len.len() > 1 {
        let offending = sequences
            .iter()
            .filter(|s| s.frames.len() != n)
            .map(|s| s.image_id.clone())
            .collect();
        return Err(MetricError::RaggedSequences(offending));
    }
    if n < 2 {
        return Err(MetricError::SequenceTooShort(n));
    }
    Ok(Some(n))
}

pub fn flip_tally(sequences: &[FlipSequence], iou_threshold: f64) -> Result<FlipTally, MetricError> {
    let Some(n) = common_length(sequences)? else {
        return Ok(FlipTally::default());
    };
    let mut tally = FlipTally::default();
    for s in sequences {
        tally.sequences += 1;
        if s.truth.is_empty() {
            continue;
        }
        tally.objects += s.truth.len() as u64;
        tally.transitions += (s.truth.len() * (n - 1)) as u64;
        let mut prev = s.frame_labels(0, iou_threshold);
        for j in 1..n {
            let cur = s.frame_labels(j, iou_threshold);
            tally.flips += prev.iter().zip(&cur).filter(|(a, b)| a != b).count() as u64;
            prev = cur;
        }
    }
    Ok(tally)
}

/// Flip probability: label changes between consecutive frames, per
/// ground-truth object, over `objects * (n - 1)` transitions.
///
/// With one object per image this is exactly
/// `1/(m(n-1)) * sum_i sum_j 1[f(x_j^i) != f(x_{j-1}^i)]`. An unmatched
/// object carries the label "none", which differs from every class.
pub fn flip_probability(sequences: &[FlipSequence], iou_threshold: f64) -> Result<f64, MetricError> {
    flip_tally(sequences, iou_threshold)?.probability()
}
