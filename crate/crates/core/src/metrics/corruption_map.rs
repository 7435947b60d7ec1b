use super::MetricError;
use crate::spec::{CorruptionKind, Intensity};

/// Arithmetic mean of the included per-class APs.
pub fn mean_ap<I>(per_class_ap: I) -> Result<f64, MetricError>
where
    I: IntoIterator<Item = f64>,
{
    let (sum, n) = per_class_ap
        .into_iter()
        .fold((0.0, 0usize), |(s, n), ap| (s + ap, n + 1));
    if n == 0 {
        Err(MetricError::NoScoredClasses)
    } else {
        Ok(sum / n as f64)
    }
}

/// Corruption mAP: the sum of one corruption's mAPs over low, medium and high.
///
/// Summed in fixed low, medium, high order whatever the input order.
pub fn cmap(per_intensity: &[(Intensity, f64)]) -> Result<f64, MetricError> {
    let mut slots: [Option<f64>; 3] = [None; 3];
    for &(i, v) in per_intensity {
        let slot = &mut slots[i as usize];
        if slot.is_some() {
            return Err(MetricError::DuplicateIntensity(i));
        }
        *slot = Some(v);
    }
    let mut total = 0.0;
    for (slot, i) in slots.iter().zip(Intensity::ALL) {
        total += slot.ok_or(MetricError::MissingIntensity(i))?;
    }
    Ok(total)
}

/// Mean CmAP over the weather corruption set {fog, sunflare, snow}.
pub fn mcmap(per_corruption: &[(CorruptionKind, f64)]) -> Result<f64, MetricError> {
    let mut slots: [Option<f64>; 3] = [None; 3];
    for &(k, v) in per_corruption {
        let idx = CorruptionKind::WEATHER
            .iter()
            .position(|w| *w == k)
            .ok_or(MetricError::NotWeather(k))?;
        if slots[idx].is_some() {
            return Err(MetricError::DuplicateCorruption(k));
        }
        slots[idx] = Some(v);
    }
    let mut total = 0.0;
    for (slot, k) in slots.iter().zip(CorruptionKind::WEATHER) {
        total += slot.ok_or(MetricError::MissingCorruption(k))?;
    }
    Ok(total / CorruptionKind::WEATHER.len() as f64)
}
