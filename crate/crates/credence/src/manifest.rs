//! Run manifests (JSON) for `evaluate` and `flip`.
//!
//! Relative paths resolve against the manifest's directory. Every
//! validation error carries a JSON pointer to the offending value.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use credence_core::{
    CellKey, ClassRegistry, CorruptionKind, DegradationProfile, Degree, Level,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LoadError, ManifestError};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

const ALLOWED_KINDS: &str = "clean, gaussian_noise, gaussian_blur, fog, sunflare, snow";

/// One evaluation cell of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestCell {
    pub cell: CellKey,
    /// Directory of `<image_id>.txt` prediction files.
    pub predictions: PathBuf,
    /// Directory of `<image_id>.txt` KITTI label files.
    pub ground_truth: PathBuf,
    pub images: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub class_registry: ClassRegistry,
    pub iou_threshold: f64,
    pub seed: u64,
    pub cells: Vec<ManifestCell>,
    pub profile: Option<DegradationProfile>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_registry: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iou_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    cells: Vec<RawCell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<DegradationProfile>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<Value>,
    predictions: PathBuf,
    ground_truth: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    images: Option<PathBuf>,
}

/// Deserializes `value`, mapping structural errors to JSON pointers.
fn from_value<T: DeserializeOwned>(value: Value) -> Result<T, ManifestError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => {
                    pointer.push('/');
                    pointer.push_str(&key.replace('~', "~0").replace('/', "~1"));
                }
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => pointer.push_str("/?"),
            }
        }
        ManifestError::at(if pointer.is_empty() { "/".into() } else { pointer }, e.inner().to_string())
    })
}

fn parse_json(path: &Path) -> Result<Value, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| LoadError::Invalid {
        path: path.to_path_buf(),
        source: ManifestError::at("/", format!("invalid JSON: {e}")),
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn resolve_existing(base: &Path, p: &Path, pointer: String) -> Result<PathBuf, ManifestError> {
    let full = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
    if full.exists() {
        Ok(full)
    } else {
        Err(ManifestError::at(
            pointer,
            format!("referenced path does not exist: {}", full.display()),
        ))
    }
}

fn registry_from(names: Option<Vec<String>>) -> Result<ClassRegistry, ManifestError> {
    match names {
        None => Ok(ClassRegistry::kitti()),
        Some(n) => ClassRegistry::new(n).map_err(|e| ManifestError::at("/class_registry", e.to_string())),
    }
}

fn threshold_from(t: Option<f64>) -> Result<f64, ManifestError> {
    let t = t.unwrap_or(DEFAULT_IOU_THRESHOLD);
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(ManifestError::at("/iou_threshold", format!("{t} outside (0, 1)")))
    }
}

fn parse_cell(kind: &str, level: Option<&Value>, at: &str) -> Result<CellKey, ManifestError> {
    if kind == "clean" {
        return match level {
            None | Some(Value::Null) => Ok(CellKey::Clean),
            Some(_) => Err(ManifestError::at(format!("{at}/level"), "clean cells take no level")),
        };
    }
    let kind: CorruptionKind = kind.parse().map_err(|_| {
        ManifestError::at(
            format!("{at}/kind"),
            format!("unknown corruption kind '{kind}'; allowed kinds: {ALLOWED_KINDS}"),
        )
    })?;
    let level_at = format!("{at}/level");
    let level = match level {
        Some(Value::String(s)) => s.parse::<Level>().map_err(|e| ManifestError::at(&level_at, e.to_string()))?,
        Some(Value::Number(n)) => {
            let d = n
                .as_i64()
                .ok_or_else(|| ManifestError::at(&level_at, format!("degree {n} is not an integer")))?;
            Level::Degree(Degree::try_from(d).map_err(|e| ManifestError::at(&level_at, e.to_string()))?)
        }
        None | Some(Value::Null) => {
            return Err(ManifestError::at(&level_at, format!("level required for '{kind}'")))
        }
        Some(other) => {
            return Err(ManifestError::at(&level_at, format!("expected string or integer, got {other}")))
        }
    };
    CellKey::new(kind, level).map_err(|e| ManifestError::at(&level_at, e.to_string()))
}

fn level_value(cell: &CellKey) -> Option<Value> {
    match cell {
        CellKey::Clean => None,
        CellKey::Corrupted { level: Level::Intensity(i), .. } => Some(Value::String(i.to_string())),
        CellKey::Corrupted { level: Level::Degree(d), .. } => Some(Value::from(d.get())),
    }
}

fn kind_str(cell: &CellKey) -> String {
    match cell {
        CellKey::Clean => "clean".into(),
        CellKey::Corrupted { kind, .. } => kind.to_string(),
    }
}

impl RunManifest {
    pub fn from_value(value: Value, base: &Path) -> Result<Self, ManifestError> {
        let raw: RawManifest = from_value(value)?;
        let class_registry = registry_from(raw.class_registry)?;
        let iou_threshold = threshold_from(raw.iou_threshold)?;
        let mut seen = BTreeSet::new();
        let mut cells = Vec::with_capacity(raw.cells.len());
        for (i, c) in raw.cells.into_iter().enumerate() {
            let at = format!("/cells/{i}");
            let cell = parse_cell(&c.kind, c.level.as_ref(), &at)?;
            if !seen.insert(cell) {
                return Err(ManifestError::at(at, format!("duplicate cell '{cell}'")));
            }
            cells.push(ManifestCell {
                cell,
                predictions: resolve_existing(base, &c.predictions, format!("{at}/predictions"))?,
                ground_truth: resolve_existing(base, &c.ground_truth, format!("{at}/ground_truth"))?,
                images: c
                    .images
                    .map(|p| resolve_existing(base, &p, format!("{at}/images")))
                    .transpose()?,
            });
        }
        if let Some(p) = &raw.profile {
            p.validate().map_err(|e| ManifestError::at("/profile", e.to_string()))?;
        }
        Ok(Self {
            class_registry,
            iou_threshold,
            seed: raw.seed.unwrap_or(0),
            cells,
            profile: raw.profile,
        })
    }

    pub fn to_value(&self) -> Value {
        let raw = RawManifest {
            class_registry: Some(self.class_registry.names().to_vec()),
            iou_threshold: Some(self.iou_threshold),
            seed: Some(self.seed),
            cells: self
                .cells
                .iter()
                .map(|c| RawCell {
                    kind: kind_str(&c.cell),
                    level: level_value(&c.cell),
                    predictions: c.predictions.clone(),
                    ground_truth: c.ground_truth.clone(),
                    images: c.images.clone(),
                })
                .collect(),
            profile: self.profile,
        };
        serde_json::to_value(raw).expect("manifest serializes")
    }
}

pub fn load_manifest(path: &Path) -> Result<RunManifest, LoadError> {
    let value = parse_json(path)?;
    RunManifest::from_value(value, &base_dir(path)).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

/// One configuration of perturbation sequences, e.g. "noise+blur".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlipCell {
    pub name: String,
    pub ground_truth: PathBuf,
    /// Prediction directories ordered by increasing perturbation.
    pub frames: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipManifest {
    pub class_registry: ClassRegistry,
    pub iou_threshold: f64,
    pub cells: Vec<FlipCell>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlipManifest {
    #[serde(default)]
    class_registry: Option<Vec<String>>,
    #[serde(default)]
    iou_threshold: Option<f64>,
    cells: Vec<RawFlipCell>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlipCell {
    name: String,
    ground_truth: PathBuf,
    frames: Vec<PathBuf>,
}

impl FlipManifest {
    pub fn from_value(value: Value, base: &Path) -> Result<Self, ManifestError> {
        let raw: RawFlipManifest = from_value(value)?;
        let mut names = BTreeSet::new();
        let mut cells = Vec::new();
        for (i, c) in raw.cells.into_iter().enumerate() {
            let at = format!("/cells/{i}");
            if !names.insert(c.name.clone()) {
                return Err(ManifestError::at(format!("{at}/name"), format!("duplicate cell name '{}'", c.name)));
            }
            if c.frames.len() < 2 {
                return Err(ManifestError::at(
                    format!("{at}/frames"),
                    format!("need at least 2 frames, got {}", c.frames.len()),
                ));
            }
            let frames = c
                .frames
                .iter()
                .enumerate()
                .map(|(j, f)| resolve_existing(base, f, format!("{at}/frames/{j}")))
                .collect::<Result<_, _>>()?;
            cells.push(FlipCell {
                name: c.name,
                ground_truth: resolve_existing(base, &c.ground_truth, format!("{at}/ground_truth"))?,
                frames,
            });
        }
        Ok(Self {
            class_registry: registry_from(raw.class_registry)?,
            iou_threshold: threshold_from(raw.iou_threshold)?,
            cells,
        })
    }
}

pub fn load_flip_manifest(path: &Path) -> Result<FlipManifest, LoadError> {
    let value = parse_json(path)?;
    FlipManifest::from_value(value, &base_dir(path)).map_err(|source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

/// A mock-detector profile file: either a bare profile object or a
/// manifest carrying one under `profile`.
pub fn load_profile(path: &Path) -> Result<DegradationProfile, LoadError> {
    let invalid = |source| LoadError::Invalid {
        path: path.to_path_buf(),
        source,
    };
    let mut value = parse_json(path)?;
    let (value, at) = match value.get_mut("profile") {
        Some(p) => (p.take(), "/profile"),
        None => (value, ""),
    };
    let profile: DegradationProfile = from_value(value).map_err(|mut e| {
        e.pointer = format!("{at}{}", if e.pointer == "/" && !at.is_empty() { "" } else { &e.pointer });
        invalid(e)
    })?;
    profile
        .validate()
        .map_err(|e| invalid(ManifestError::at(if at.is_empty() { "/" } else { at }, e.to_string())))?;
    Ok(profile)
}
