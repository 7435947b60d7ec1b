//! Directory-level loading: label, prediction and image folders keyed by image id.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use credence_core::{ClassRegistry, Detection, FlipSequence, GroundTruthBox, ImageEval};

use crate::error::{decode_utf8, DatasetError};
use crate::labels::parse_kitti_labels;
use crate::predictions::parse_predictions;

pub const TEXT_EXT: &str = "txt";

/// Files in `dir` with one of `exts`, keyed by file stem, in sorted order.
pub fn list_files(dir: &Path, exts: &[&str]) -> Result<BTreeMap<String, PathBuf>, DatasetError> {
    let io = |source| DatasetError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if !ext.is_some_and(|e| exts.contains(&e.as_str())) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.insert(stem.to_string(), path);
        }
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String, DatasetError> {
    let bytes = std::fs::read(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_utf8(&bytes)
        .map(str::to_owned)
        .map_err(|source| DatasetError::Parse {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_label_file(path: &Path, registry: &ClassRegistry) -> Result<Vec<GroundTruthBox>, DatasetError> {
    parse_kitti_labels(&read_text(path)?, registry).map_err(|source| DatasetError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_prediction_file(path: &Path, registry: &ClassRegistry) -> Result<Vec<Detection>, DatasetError> {
    parse_predictions(&read_text(path)?, registry).map_err(|source| DatasetError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Every `<image_id>.txt` label file in `dir`.
pub fn load_ground_truth_dir(
    dir: &Path,
    registry: &ClassRegistry,
) -> Result<BTreeMap<String, Vec<GroundTruthBox>>, DatasetError> {
    list_files(dir, &[TEXT_EXT])?
        .into_iter()
        .map(|(id, path)| Ok((id, load_label_file(&path, registry)?)))
        .collect()
}

/// Pairs every ground-truth image with its prediction file from `pred_dir`.
/// A missing prediction file is an error; an empty file means no detections.
pub fn load_cell_images(
    pred_dir: &Path,
    gt_dir: &Path,
    registry: &ClassRegistry,
) -> Result<Vec<ImageEval>, DatasetError> {
    let truth = load_ground_truth_dir(gt_dir, registry)?;
    let preds = list_files(pred_dir, &[TEXT_EXT])?;
    truth
        .into_iter()
        .map(|(image_id, truth)| {
            let path = preds.get(&image_id).ok_or_else(|| DatasetError::MissingPredictions {
                path: pred_dir.to_path_buf(),
                image_id: image_id.clone(),
            })?;
            Ok(ImageEval {
                predictions: load_prediction_file(path, registry)?,
                image_id,
                truth,
            })
        })
        .collect()
}

/// One sequence per ground-truth image; frame `j` comes from `frame_dirs[j]`.
/// Images missing from a frame directory get a shorter sequence, which the
/// flip metric reports as ragged.
pub fn load_flip_sequences(
    gt_dir: &Path,
    frame_dirs: &[PathBuf],
    registry: &ClassRegistry,
) -> Result<Vec<FlipSequence>, DatasetError> {
    let truth = load_ground_truth_dir(gt_dir, registry)?;
    let listings = frame_dirs
        .iter()
        .map(|d| list_files(d, &[TEXT_EXT]))
        .collect::<Result<Vec<_>, _>>()?;
    truth
        .into_iter()
        .map(|(image_id, truth)| {
            let mut frames = Vec::new();
            for listing in &listings {
                if let Some(path) = listing.get(&image_id) {
                    frames.push(load_prediction_file(path, registry)?);
                }
            }
            Ok(FlipSequence {
                image_id,
                truth,
                frames,
            })
        })
        .collect()
}
