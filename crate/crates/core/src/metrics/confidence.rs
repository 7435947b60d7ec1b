use super::MetricError;
use crate::detection::Detection;

/// Mean confidence pooled over every detection.
///
/// Uses a running mean, so identical confidences average to exactly that value.
pub fn average_confidence<'a, I>(detections: I) -> Result<f64, MetricError>
where
    I: IntoIterator<Item = &'a Detection>,
{
    let mut mean = 0.0;
    let mut n = 0u64;
    for d in detections {
        n += 1;
        mean += (d.confidence() - mean) / n as f64;
    }
    if n == 0 {
        Err(MetricError::NoDetections)
    } else {
        Ok(mean)
    }
}
