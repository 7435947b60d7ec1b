use alloc::vec;
use alloc::vec::Vec;

use super::{ImageEval, MetricError};
use crate::class::ClassId;
use crate::geometry::iou;

/// Area under the precision envelope for a ranked TP/FP list.
///
/// `ranked[k]` says whether the k-th most confident detection is a true
/// positive; `positives` is the number of ground-truth instances.
pub fn ap_from_ranked(ranked: &[bool], positives: usize) -> f64 {
    if positives == 0 || ranked.is_empty() {
        return 0.0;
    }
    let mut precision = Vec::with_capacity(ranked.len());
    let mut recall = Vec::with_capacity(ranked.len());
    let mut tp = 0usize;
    for (k, &hit) in ranked.iter().enumerate() {
        if hit {
            tp += 1;
        }
        precision.push(tp as f64 / (k + 1) as f64);
        recall.push(tp as f64 / positives as f64);
    }
    for k in (0..precision.len().saturating_sub(1)).rev() {
        if precision[k + 1] > precision[k] {
            precision[k] = precision[k + 1];
        }
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (p, r) in precision.iter().zip(&recall) {
        ap += (r - prev_recall) * p;
        prev_recall = *r;
    }
    ap
}

/// Every-point interpolated AP of `class` over one evaluation cell.
///
/// Detections of `class` are pooled across images and ranked by confidence
/// (ties: image order, then file order). Each claims the best unclaimed
/// same-class box in its own image with IoU at or above `iou_threshold`.
pub fn average_precision(
    class: &ClassId,
    images: &[ImageEval],
    iou_threshold: f64,
) -> Result<f64, MetricError> {
    let positives: usize = images
        .iter()
        .map(|im| im.truth.iter().filter(|t| t.class == *class).count())
        .sum();
    if positives == 0 {
        return Err(MetricError::NoGroundTruth(class.clone()));
    }

    let mut ranked: Vec<(f64, usize, usize)> = Vec::new();
    for (i, im) in images.iter().enumerate() {
        for (j, d) in im.predictions.iter().enumerate() {
            if d.class() == class {
                ranked.push((d.confidence(), i, j));
            }
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut claimed: Vec<Vec<bool>> = images
        .iter()
        .map(|im| vec![false; im.truth.len()])
        .collect();
    let hits: Vec<bool> = ranked
        .iter()
        .map(|&(_, i, j)| {
            let det = &images[i].predictions[j];
            let mut best: Option<(usize, f64)> = None;
            for (t, gt) in images[i].truth.iter().enumerate() {
                if gt.class != *class || claimed[i][t] {
                    continue;
                }
                let o = iou(det.bbox(), &gt.bbox);
                if o >= iou_threshold && best.is_none_or(|(_, b)| o > b) {
                    best = Some((t, o));
                }
            }
            match best {
                Some((t, _)) => {
                    claimed[i][t] = true;
                    true
                }
                None => false,
            }
        })
        .collect();

    Ok(ap_from_ranked(&hits, positives))
}
