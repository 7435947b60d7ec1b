//! Shared fixtures for the acceptance suite: a fixed test image, published
//! reference numbers, and writers for synthetic on-disk datasets.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use credence::{write_image, write_kitti_labels, write_predictions};
use credence_core::{
    BBox, ClassId, ClassRegistry, CorruptionKind, Detection, GroundTruthBox, Intensity, Raster, Rng,
};

/// Deterministic 64×64 gradient image without pure-white pixels.
pub fn fixture_64() -> Raster {
    let mut px = Vec::with_capacity(64 * 64);
    for y in 0..64u32 {
        for x in 0..64u32 {
            px.push([
                ((x * 4) % 256) as u8,
                ((y * 4) % 256) as u8,
                ((x * y + 3 * x + 7 * y) % 256) as u8,
            ]);
        }
    }
    Raster::new(64, 64, px).expect("64x64 fixture")
}

/// Published per-class AP in registry order (Pedestrian, Cyclist, Car, Van,
/// Misc, Truck, Person_sitting, Tram), columns low/medium/high.
pub const REFERENCE_AP: [(CorruptionKind, [[f64; 3]; 8]); 3] = [
    (
        CorruptionKind::Fog,
        [
            [0.856, 0.631, 0.406],
            [0.809, 0.449, 0.140],
            [0.975, 0.792, 0.347],
            [0.685, 0.385, 0.212],
            [0.640, 0.125, 0.013],
            [0.780, 0.217, 0.048],
            [0.882, 0.283, 0.085],
            [0.717, 0.244, 0.070],
        ],
    ),
    (
        CorruptionKind::Sunflare,
        [
            [0.729, 0.570, 0.390],
            [0.789, 0.610, 0.380],
            [0.761, 0.398, 0.193],
            [0.709, 0.569, 0.351],
            [0.615, 0.517, 0.152],
            [0.651, 0.545, 0.332],
            [0.715, 0.431, 0.210],
            [0.729, 0.557, 0.321],
        ],
    ),
    (
        CorruptionKind::Snow,
        [
            [0.909, 0.909, 0.773],
            [0.920, 0.920, 0.685],
            [1.000, 1.000, 0.700],
            [0.854, 0.854, 0.619],
            [0.781, 0.781, 0.344],
            [0.933, 0.933, 0.614],
            [0.953, 0.953, 0.612],
            [0.767, 0.767, 0.410],
        ],
    ),
];

/// Published mAP per weather corruption, columns low/medium/high.
pub const REFERENCE_MAP: [(CorruptionKind, [f64; 3]); 3] = [
    (CorruptionKind::Fog, [0.793, 0.391, 0.165]),
    (CorruptionKind::Sunflare, [0.712, 0.524, 0.291]),
    (CorruptionKind::Snow, [0.890, 0.890, 0.595]),
];

/// Published CmAP per weather corruption.
pub const REFERENCE_CMAP: [(CorruptionKind, f64); 3] = [
    (CorruptionKind::Fog, 1.349),
    (CorruptionKind::Sunflare, 1.528),
    (CorruptionKind::Snow, 2.373),
];

pub const REFERENCE_MCMAP: f64 = 1.75;

/// Published fog low→high differences and the three marked largest.
pub const REFERENCE_FOG_DIFFERENCE: [f64; 8] = [0.450, 0.669, 0.628, 0.473, 0.627, 0.732, 0.797, 0.647];
pub const REFERENCE_FOG_TOP3: [&str; 3] = ["Cyclist", "Truck", "Person_sitting"];

pub fn reference_ap(kind: CorruptionKind) -> &'static [[f64; 3]; 8] {
    &REFERENCE_AP.iter().find(|(k, _)| *k == kind).expect("weather kind").1
}

/// Directory name for a weather cell, e.g. `fog_high`.
pub fn cell_dir(kind: CorruptionKind, intensity: Intensity) -> String {
    format!("{}_{}", kind.as_str(), intensity.as_str())
}

/// Truth boxes per class for the reference-grid fixture.
pub const REFERENCE_POSITIVES: usize = 1000;

fn reference_box(k: usize) -> BBox {
    let x = 20.0 * k as f64;
    BBox::new(x, 0.0, x + 10.0, 10.0).expect("fixture box")
}

/// Writes a dataset whose evaluation reproduces `REFERENCE_AP` exactly.
///
/// Every class gets one image holding `REFERENCE_POSITIVES` boxes; in the
/// cell for AP `a`, the first `round(a * REFERENCE_POSITIVES)` boxes are
/// detected exactly and nothing else is, so AP equals `a`. Returns the
/// manifest path.
pub fn write_reference_grid(root: &Path) -> io::Result<PathBuf> {
    let registry = ClassRegistry::kitti();
    let gt = root.join("ground_truth");
    fs::create_dir_all(&gt)?;
    let classes: Vec<ClassId> = registry.classes().collect();
    for (c, class) in classes.iter().enumerate() {
        let boxes: Vec<GroundTruthBox> = (0..REFERENCE_POSITIVES)
            .map(|k| GroundTruthBox::new(class.clone(), reference_box(k)))
            .collect();
        fs::write(gt.join(format!("class{c}.txt")), write_kitti_labels(&boxes))?;
    }

    let mut cells = Vec::new();
    for (kind, table) in &REFERENCE_AP {
        for (col, intensity) in Intensity::ALL.into_iter().enumerate() {
            let name = cell_dir(*kind, intensity);
            let dir = root.join("predictions").join(&name);
            fs::create_dir_all(&dir)?;
            for (c, class) in classes.iter().enumerate() {
                let hits = (table[c][col] * REFERENCE_POSITIVES as f64).round() as usize;
                let dets: Vec<Detection> = (0..hits)
                    .map(|k| Detection::new(class.clone(), reference_box(k), 0.9).expect("valid"))
                    .collect();
                fs::write(dir.join(format!("class{c}.txt")), write_predictions(&dets))?;
            }
            cells.push(serde_json::json!({
                "kind": kind.as_str(),
                "level": intensity.as_str(),
                "predictions": format!("predictions/{name}"),
                "ground_truth": "ground_truth",
            }));
        }
    }
    let manifest = root.join("manifest.json");
    let doc = serde_json::json!({ "iou_threshold": 0.5, "cells": cells });
    fs::write(&manifest, serde_json::to_string_pretty(&doc)?)?;
    Ok(manifest)
}

/// On-disk synthetic road-scene stand-in.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub images: PathBuf,
    pub labels: PathBuf,
    /// Image ids in sorted order with their truth.
    pub truth: Vec<(String, Vec<GroundTruthBox>)>,
}

pub const SYNTH_WIDTH: u32 = 96;
pub const SYNTH_HEIGHT: u32 = 64;

/// Generates truth for `n` images: 1–4 non-overlapping boxes each, one per
/// 48×32 quadrant, with uniformly drawn registry classes.
pub fn synthetic_truth(n: usize, seed: u64, registry: &ClassRegistry) -> Vec<(String, Vec<GroundTruthBox>)> {
    let mut rng = Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let objects = 1 + rng.below(4) as usize;
            let boxes = (0..objects)
                .map(|q| {
                    let (ox, oy) = (48.0 * (q % 2) as f64, 32.0 * (q / 2) as f64);
                    let w = 12.0 + rng.below(30) as f64;
                    let h = 10.0 + rng.below(18) as f64;
                    let l = ox + rng.below((48.0 - w) as u64 + 1) as f64;
                    let t = oy + rng.below((32.0 - h) as u64 + 1) as f64;
                    let class = registry.get(rng.below(registry.len() as u64) as usize).expect("index");
                    GroundTruthBox::new(class, BBox::new(l, t, l + w, t + h).expect("positive size"))
                })
                .collect();
            (format!("{i:06}"), boxes)
        })
        .collect()
}

/// Writes PNG images with the boxes painted in, plus KITTI label files.
pub fn write_synthetic_dataset(root: &Path, n: usize, seed: u64) -> io::Result<SyntheticDataset> {
    let registry = ClassRegistry::kitti();
    let images = root.join("images");
    let labels = root.join("labels");
    fs::create_dir_all(&images)?;
    fs::create_dir_all(&labels)?;
    let truth = synthetic_truth(n, seed, &registry);
    for (id, boxes) in &truth {
        let mut img = Raster::filled(SYNTH_WIDTH, SYNTH_HEIGHT, [90, 110, 100]).expect("dims");
        for (k, b) in boxes.iter().enumerate() {
            let shade = 40 + 50 * k as u8;
            for y in b.bbox.top() as u32..b.bbox.bottom() as u32 {
                for x in b.bbox.left() as u32..b.bbox.right() as u32 {
                    img.set(x, y, [shade, 200 - shade, 30]);
                }
            }
        }
        write_image(&img, &images.join(format!("{id}.png"))).map_err(io::Error::other)?;
        fs::write(labels.join(format!("{id}.txt")), write_kitti_labels(boxes))?;
    }
    Ok(SyntheticDataset { images, labels, truth })
}

#[cfg(test)]
mod reference_report;
