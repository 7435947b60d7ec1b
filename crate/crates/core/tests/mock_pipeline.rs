//! Mock detector driven through matching and metrics.

use credence_core::metrics::{evaluate_cell, flip_probability, FlipSequence, ImageEval};
use credence_core::{
    detect, BBox, CellKey, ClassRegistry, CorruptionKind, Degree, DegradationProfile, GroundTruthBox, Intensity, Level,
    Rng,
};
use proptest::prelude::*;

fn scene(rng: &mut Rng, registry: &ClassRegistry) -> Vec<GroundTruthBox> {
    (0..1 + rng.below(6))
        .map(|k| {
            let x = 40.0 * k as f64;
            let class = registry.get(rng.below(registry.len() as u64) as usize).unwrap();
            GroundTruthBox::new(class, BBox::new(x, 5.0, x + 10.0 + rng.below(20) as f64, 30.0).unwrap())
        })
        .collect()
}

fn blur(d: u8) -> CellKey {
    CellKey::new(CorruptionKind::GaussianBlur, Level::Degree(Degree::new(d).unwrap())).unwrap()
}

proptest! {
    #[test]
    fn zero_rates_are_an_identity(seed: u64, d in 0u8..=5) {
        let registry = ClassRegistry::kitti();
        let mut rng = Rng::seed_from_u64(seed);
        let profile = DegradationProfile::default();
        let cell = blur(d);
        let images: Vec<ImageEval> = (0..8)
            .map(|i| {
                let truth = scene(&mut rng, &registry);
                let predictions = detect(&truth, &registry, &profile, &cell, &mut rng);
                ImageEval { image_id: format!("{i}"), predictions, truth }
            })
            .collect();
        let report = evaluate_cell(cell, &images, &registry, 0.5).unwrap();
        prop_assert_eq!(report.map, Some(1.0));
        prop_assert_eq!(report.misclassification_error, Some(0.0));

        let seqs: Vec<FlipSequence> = images
            .iter()
            .map(|im| FlipSequence {
                image_id: im.image_id.clone(),
                truth: im.truth.clone(),
                frames: (0..=5)
                    .map(|d| detect(&im.truth, &registry, &profile, &blur(d), &mut rng))
                    .collect(),
            })
            .collect();
        prop_assert_eq!(flip_probability(&seqs, 0.5), Ok(0.0));
    }
}

#[test]
fn confidence_slope_matches_decay_within_three_se() {
    let registry = ClassRegistry::kitti();
    let profile = DegradationProfile {
        base_confidence: 0.9,
        confidence_decay: 0.3,
        confidence_jitter: 0.05,
        ..DegradationProfile::default()
    };
    let truth = vec![GroundTruthBox::new(registry.resolve("Car").unwrap(), BBox::new(0., 0., 10., 10.).unwrap())];
    let n = 4000;
    for cell in [CellKey::Clean, blur(2), blur(5), CellKey::weather(CorruptionKind::Fog, Intensity::Medium).unwrap()] {
        let s = profile.severity.severity(&cell);
        let xs: Vec<f64> = (0..n)
            .map(|i| detect(&truth, &registry, &profile, &cell, &mut Rng::for_item(21, i))[0].confidence())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let want = profile.base_confidence - profile.confidence_decay * s;
        assert!((mean - want).abs() <= 3.0 * se, "{cell}: mean {mean}, want {want}, se {se}");
    }
}

#[test]
fn half_severity_confidence() {
    let registry = ClassRegistry::kitti();
    let mut profile = DegradationProfile::default();
    profile.severity.per_degree = 0.1;
    let truth = vec![GroundTruthBox::new(registry.resolve("Van").unwrap(), BBox::new(0., 0., 10., 10.).unwrap())];
    let dets = detect(&truth, &registry, &profile, &blur(5), &mut Rng::seed_from_u64(0));
    assert_eq!(dets[0].confidence(), 0.85);
}
