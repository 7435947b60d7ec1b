//! Parametric stand-in for a real detector.
//!
//! Given ground truth and a corruption cell, it emits detections whose
//! confidence, labels, recall and localization degrade linearly with the
//! cell's severity `s` in `[0, 1]`. Outcomes have closed-form expectations,
//! which is what makes the end-to-end pipeline checkable.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::class::ClassRegistry;
use crate::detection::{Detection, GroundTruthBox};
use crate::geometry::BBox;
use crate::rng::Rng;
use crate::spec::{CellKey, Intensity, Level};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("profile field {field} = {value} outside {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// Maps a corruption cell to a severity in `[0, 1]`. Clean data is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeverityMap {
    /// Severity added per gaussian degree.
    pub per_degree: f64,
    pub low: f64,
    pub medium: f64,
    pub high: f64,
}

impl Default for SeverityMap {
    fn default() -> Self {
        Self {
            per_degree: 0.2,
            low: 0.33,
            medium: 0.66,
            high: 1.0,
        }
    }
}

impl SeverityMap {
    pub fn severity(&self, cell: &CellKey) -> f64 {
        let s = match cell {
            CellKey::Clean => 0.0,
            CellKey::Corrupted { level, .. } => match level {
                Level::Degree(d) => self.per_degree * d.get() as f64,
                Level::Intensity(Intensity::Low) => self.low,
                Level::Intensity(Intensity::Medium) => self.medium,
                Level::Intensity(Intensity::High) => self.high,
            },
        };
        s.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationProfile {
    pub base_confidence: f64,
    /// Confidence lost per unit severity.
    pub confidence_decay: f64,
    /// Probability per unit severity of relabeling a detection.
    pub label_flip_rate: f64,
    /// Probability per unit severity of missing an object.
    pub drop_rate: f64,
    /// Maximum corner displacement in pixels per unit severity.
    pub bbox_jitter: f64,
    /// Half-width of the uniform confidence jitter, independent of severity.
    #[serde(default)]
    pub confidence_jitter: f64,
    #[serde(default)]
    pub severity: SeverityMap,
}

impl Default for DegradationProfile {
    fn default() -> Self {
        Self {
            base_confidence: 0.95,
            confidence_decay: 0.2,
            label_flip_rate: 0.0,
            drop_rate: 0.0,
            bbox_jitter: 0.0,
            confidence_jitter: 0.0,
            severity: SeverityMap::default(),
        }
    }
}

impl DegradationProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let unit = |field, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(ProfileError::OutOfRange {
                    field,
                    value,
                    range: "[0, 1]",
                })
            }
        };
        let non_negative = |field, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(ProfileError::OutOfRange {
                    field,
                    value,
                    range: "[0, inf)",
                })
            }
        };
        unit("base_confidence", self.base_confidence)?;
        non_negative("confidence_decay", self.confidence_decay)?;
        unit("label_flip_rate", self.label_flip_rate)?;
        unit("drop_rate", self.drop_rate)?;
        non_negative("bbox_jitter", self.bbox_jitter)?;
        non_negative("confidence_jitter", self.confidence_jitter)?;
        non_negative("severity.per_degree", self.severity.per_degree)?;
        unit("severity.low", self.severity.low)?;
        unit("severity.medium", self.severity.medium)?;
        unit("severity.high", self.severity.high)
    }

    /// Confidence emitted at severity `s` when confidence jitter is zero.
    pub fn expected_confidence(&self, s: f64) -> f64 {
        (self.base_confidence - self.confidence_decay * s).clamp(0.0, 1.0)
    }
}

/// Simulated detections for one image.
///
/// Per ground-truth box, in order: drop with probability `drop_rate * s`;
/// otherwise relabel to a uniformly chosen other registry class with
/// probability `label_flip_rate * s`; confidence is
/// `clamp(base - decay * s + jitter, 0, 1)`; each corner moves by up to
/// `bbox_jitter * s`. Every box consumes exactly eight draws so streams stay
/// aligned across profiles. A jittered box that degenerates keeps its true
/// coordinates.
pub fn detect(
    truth: &[GroundTruthBox],
    registry: &ClassRegistry,
    profile: &DegradationProfile,
    cell: &CellKey,
    rng: &mut Rng,
) -> Vec<Detection> {
    let s = profile.severity.severity(cell);
    let mut out = Vec::with_capacity(truth.len());
    for gt in truth {
        let u_drop = rng.uniform();
        let u_flip = rng.uniform();
        let u_class = rng.uniform();
        let u_conf = rng.symmetric();
        let corners = [rng.symmetric(), rng.symmetric(), rng.symmetric(), rng.symmetric()];

        if u_drop < profile.drop_rate * s {
            continue;
        }

        let mut class = gt.class.clone();
        if u_flip < profile.label_flip_rate * s {
            let own = registry.index_of(&gt.class);
            let others = registry.len() - usize::from(own.is_some());
            if others > 0 {
                let mut k = ((u_class * others as f64) as usize).min(others - 1);
                if let Some(own) = own {
                    if k >= own {
                        k += 1;
                    }
                }
                class = registry.get(k).expect("index within registry");
            }
        }

        let confidence = (profile.base_confidence - profile.confidence_decay * s
            + profile.confidence_jitter * u_conf)
            .clamp(0.0, 1.0);

        let amp = profile.bbox_jitter * s;
        let b = &gt.bbox;
        let bbox = BBox::new(
            b.left() + amp * corners[0],
            b.top() + amp * corners[1],
            b.right() + amp * corners[2],
            b.bottom() + amp * corners[3],
        )
        .unwrap_or(*b);

        out.push(Detection::new(class, bbox, confidence).expect("confidence clamped to [0, 1]"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{CorruptionKind, Degree};

    fn truth() -> Vec<GroundTruthBox> {
        let r = ClassRegistry::kitti();
        ["Car", "Van", "Pedestrian", "Tram"]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let x = 30.0 * i as f64;
                GroundTruthBox::new(r.resolve(c).unwrap(), BBox::new(x, 5., x + 20., 25.).unwrap())
            })
            .collect()
    }

    fn blur(d: u8) -> CellKey {
        CellKey::new(CorruptionKind::GaussianBlur, Level::Degree(Degree::new(d).unwrap())).unwrap()
    }

    #[test]
    fn clean_zero_jitter_is_perfect() {
        let p = DegradationProfile {
            label_flip_rate: 0.7,
            drop_rate: 0.7,
            bbox_jitter: 5.0,
            ..Default::default()
        };
        let t = truth();
        let d = detect(&t, &ClassRegistry::kitti(), &p, &CellKey::Clean, &mut Rng::seed_from_u64(1));
        assert_eq!(d.len(), t.len());
        for (det, gt) in d.iter().zip(&t) {
            assert_eq!(det.class(), &gt.class);
            assert_eq!(det.bbox(), &gt.bbox);
            assert_eq!(det.confidence(), 0.95);
        }
    }

    #[test]
    fn full_drop_empties_output() {
        let p = DegradationProfile {
            drop_rate: 1.0,
            ..Default::default()
        };
        let d = detect(&truth(), &ClassRegistry::kitti(), &p, &blur(5), &mut Rng::seed_from_u64(1));
        assert!(d.is_empty());
    }

    #[test]
    fn confidence_decays_linearly() {
        let p = DegradationProfile {
            base_confidence: 0.95,
            confidence_decay: 0.2,
            severity: SeverityMap {
                per_degree: 0.25,
                ..Default::default()
            },
            ..Default::default()
        };
        let d = detect(&truth(), &ClassRegistry::kitti(), &p, &blur(2), &mut Rng::seed_from_u64(3));
        assert!(d.iter().all(|x| (x.confidence() - 0.85).abs() < 1e-15));
        assert!(d.iter().all(|x| x.confidence() == p.expected_confidence(0.5)));
    }

    #[test]
    fn flips_always_change_the_label() {
        let p = DegradationProfile {
            label_flip_rate: 1.0,
            ..Default::default()
        };
        let t = truth();
        for seed in 0..50 {
            let d = detect(&t, &ClassRegistry::kitti(), &p, &blur(5), &mut Rng::seed_from_u64(seed));
            for (det, gt) in d.iter().zip(&t) {
                assert_ne!(det.class(), &gt.class);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = DegradationProfile {
            label_flip_rate: 0.3,
            drop_rate: 0.3,
            bbox_jitter: 3.0,
            confidence_jitter: 0.05,
            ..Default::default()
        };
        let r = ClassRegistry::kitti();
        let a = detect(&truth(), &r, &p, &blur(4), &mut Rng::seed_from_u64(9));
        let b = detect(&truth(), &r, &p, &blur(4), &mut Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn severity_defaults() {
        let m = SeverityMap::default();
        assert_eq!(m.severity(&CellKey::Clean), 0.0);
        assert_eq!(m.severity(&blur(5)), 1.0);
        assert_eq!(
            m.severity(&CellKey::weather(CorruptionKind::Fog, Intensity::Medium).unwrap()),
            0.66
        );
    }

    #[test]
    fn validation() {
        assert!(DegradationProfile::default().validate().is_ok());
        let bad = DegradationProfile {
            drop_rate: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
