use super::MetricError;
use crate::matching::Counts;

/// `(FP + FN) / (TP + TN + FP + FN)`.
pub fn misclassification_error(counts: Counts) -> Result<f64, MetricError> {
    let total = counts.total();
    if total == 0 {
        return Err(MetricError::ZeroDenominator);
    }
    Ok((counts.fp + counts.fn_) as f64 / total as f64)
}
