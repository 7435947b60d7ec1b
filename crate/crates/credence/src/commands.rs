//! Command implementations behind the CLI. Each returns its result instead
//! of printing so it can be driven from tests.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use credence_core::metrics::{evaluate_cell, flip_tally, MetricError};
use credence_core::{
    apply, detect, CellKey, ClassRegistry, CorruptionParams, CorruptionSpec, DegradationProfile,
    Rng,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{list_files, load_cell_images, load_flip_sequences, load_ground_truth_dir};
use crate::image_io::{read_image, write_image};
use crate::manifest::{FlipManifest, RunManifest};
use crate::predictions::{PredictionRecord, Provenance};
use crate::report::{render_csv, render_text, FlipCellReport, FlipReport, ReportDocument};

pub const SIDECAR_FILE: &str = "corruptions.json";
pub const SIDECAR_SCHEMA: &str = "credence-corruptions/1";
pub const IMAGE_EXTS: [&str; 3] = ["png", "ppm", "pnm"];

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    b.build().context("building worker pool")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub file: String,
    pub spec: CorruptionSpec,
}

/// Written next to corrupted images; records the exact spec per file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub schema_version: String,
    pub params: CorruptionParams,
    pub files: Vec<SidecarEntry>,
}

#[derive(Debug, Clone)]
pub struct CorruptArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    pub spec: CorruptionSpec,
    pub params: CorruptionParams,
    pub jobs: Option<usize>,
}

/// Corrupts every image in `input` into `output` under the same file name.
///
/// Image `k` (sorted by file name) uses seed `Rng::derive_seed(seed, k)`.
/// Nothing is written unless every input decodes; if a write fails, files
/// already written are removed.
pub fn corrupt(args: &CorruptArgs) -> Result<Sidecar> {
    args.params.validate()?;
    if args.input.canonicalize().ok() == args.output.canonicalize().ok() && args.output.exists() {
        bail!("output directory must differ from input directory");
    }
    let files = list_files(&args.input, &IMAGE_EXTS)?;
    let files: Vec<PathBuf> = files.into_values().collect();
    let pool = pool(args.jobs)?;

    let decoded: Vec<Result<_, String>> = pool.install(|| {
        files
            .par_iter()
            .map(|p| read_image(p).map_err(|e| format!("{}: {e}", p.display())))
            .collect()
    });
    let errors: Vec<&String> = decoded.iter().filter_map(|r| r.as_ref().err()).collect();
    if !errors.is_empty() {
        bail!(
            "{} unreadable input file(s):\n  {}",
            errors.len(),
            errors.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n  ")
        );
    }

    let jobs: Vec<(String, PathBuf, CorruptionSpec, credence_core::Raster)> = files
        .iter()
        .zip(decoded)
        .enumerate()
        .map(|(k, (path, img))| {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let spec = args.spec.with_seed(Rng::derive_seed(args.spec.seed(), k as u64));
            (name, args.output.join(path.file_name().unwrap()), spec, img.unwrap())
        })
        .collect();

    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let results: Vec<Result<(), String>> = pool.install(|| {
        jobs.par_iter()
            .map(|(_, out, spec, img)| {
                let corrupted = apply(img, spec, &args.params).map_err(|e| e.to_string())?;
                write_image(&corrupted, out).map_err(|e| format!("{}: {e}", out.display()))
            })
            .collect()
    });
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    if !failures.is_empty() {
        for (_, out, _, _) in &jobs {
            let _ = std::fs::remove_file(out);
        }
        bail!("writing outputs failed:\n  {}", failures.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n  "));
    }

    let sidecar = Sidecar {
        schema_version: SIDECAR_SCHEMA.into(),
        params: args.params.clone(),
        files: jobs
            .into_iter()
            .map(|(file, _, spec, _)| SidecarEntry { file, spec })
            .collect(),
    };
    let path = args.output.join(SIDECAR_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&sidecar)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(sidecar)
}

/// Evaluates every manifest cell and derives the aggregate.
pub fn evaluate(manifest: &RunManifest, jobs: Option<usize>) -> Result<ReportDocument> {
    let pool = pool(jobs)?;
    let reports: Vec<Result<_>> = pool.install(|| {
        manifest
            .cells
            .par_iter()
            .map(|c| {
                let images = load_cell_images(&c.predictions, &c.ground_truth, &manifest.class_registry)?;
                evaluate_cell(c.cell, &images, &manifest.class_registry, manifest.iou_threshold)
                    .with_context(|| format!("cell {}", c.cell))
            })
            .collect()
    });
    let cells = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ReportDocument::new(
        manifest.class_registry.clone(),
        manifest.iou_threshold,
        manifest.to_value(),
        cells,
    ))
}

/// Flip probability per sequence configuration and pooled overall.
/// Ragged sequences are an error; a cell without objects is reported as undefined.
pub fn flip(manifest: &FlipManifest) -> Result<FlipReport> {
    let mut cells = Vec::new();
    for c in &manifest.cells {
        let seqs = load_flip_sequences(&c.ground_truth, &c.frames, &manifest.class_registry)?;
        let tally = match flip_tally(&seqs, manifest.iou_threshold) {
            Ok(t) => t,
            Err(e @ MetricError::RaggedSequences(_)) => {
                bail!("cell '{}': {e}", c.name)
            }
            Err(e) => return Err(e).with_context(|| format!("cell '{}'", c.name)),
        };
        cells.push(FlipCellReport::from_tally(c.name.clone(), tally));
    }
    Ok(FlipReport::new(manifest.iou_threshold, cells))
}

#[derive(Debug, Clone)]
pub struct MockDetectArgs {
    pub ground_truth: PathBuf,
    pub output: PathBuf,
    pub profile: DegradationProfile,
    pub registry: ClassRegistry,
    /// `None` for clean input.
    pub cell: CellKey,
    pub seed: u64,
}

/// Writes one prediction file per label file. Image `k` in sorted id order
/// draws from `Rng::for_item(seed, k)`.
pub fn mock_detect(args: &MockDetectArgs) -> Result<Vec<PredictionRecord>> {
    args.profile.validate()?;
    let truth = load_ground_truth_dir(&args.ground_truth, &args.registry)?;
    let provenance = match args.cell {
        CellKey::Clean => Provenance::Clean,
        CellKey::Corrupted { kind, level } => {
            Provenance::Corrupted(CorruptionSpec::new(kind, level, args.seed)?)
        }
    };
    std::fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    let mut records = Vec::with_capacity(truth.len());
    for (k, (image_id, boxes)) in truth.into_iter().enumerate() {
        let mut rng = Rng::for_item(args.seed, k as u64);
        let record = PredictionRecord {
            detections: detect(&boxes, &args.registry, &args.profile, &args.cell, &mut rng),
            image_id,
            provenance: Some(provenance),
        };
        let path = args.output.join(format!("{}.txt", record.image_id));
        std::fs::write(&path, record.to_text()).with_context(|| format!("writing {}", path.display()))?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

pub fn report(json: &str, format: ReportFormat) -> Result<String> {
    let doc = ReportDocument::from_json(json)?;
    Ok(match format {
        ReportFormat::Text => render_text(&doc),
        ReportFormat::Csv => render_csv(&doc)?,
    })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
