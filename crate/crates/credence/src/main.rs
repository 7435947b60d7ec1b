use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use credence::commands::{self, CorruptArgs, MockDetectArgs, ReportFormat};
use credence::manifest::{load_flip_manifest, load_manifest, load_profile};
use credence::report::render_flip_text;
use credence_core::{CellKey, ClassRegistry, CorruptionKind, CorruptionParams, CorruptionSpec, Level};

/// Corrupt road-scene images and score detector credibility from prediction files.
#[derive(Parser)]
#[command(name = "credence", version)]
struct Cli {
    /// Base seed for corruption and mock detection.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the manifest IoU threshold, in (0, 1).
    #[arg(long, global = true)]
    iou_threshold: Option<f64>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    GaussianNoise,
    GaussianBlur,
    Fog,
    Sunflare,
    Snow,
}

impl From<Kind> for CorruptionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::GaussianNoise => CorruptionKind::GaussianNoise,
            Kind::GaussianBlur => CorruptionKind::GaussianBlur,
            Kind::Fog => CorruptionKind::Fog,
            Kind::Sunflare => CorruptionKind::Sunflare,
            Kind::Snow => CorruptionKind::Snow,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write corrupted copies of every PNG/PPM image in a directory.
    Corrupt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// low|medium|high for weather kinds, 0-5 for gaussian kinds.
        #[arg(long)]
        level: Level,
        /// JSON file overriding the severity parameter table.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Fog without white blending (pure blur).
        #[arg(long)]
        strict_paper_fog: bool,
    },
    /// Evaluate every cell of a run manifest into a JSON report.
    Evaluate {
        #[arg(long, env = "CREDENCE_MANIFEST")]
        manifest: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Flip probability over perturbation sequences.
    Flip {
        #[arg(long, env = "CREDENCE_MANIFEST")]
        manifest: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Simulate detector output from ground truth.
    MockDetect {
        #[arg(long)]
        ground_truth: PathBuf,
        /// Profile JSON, bare or under a `profile` key.
        #[arg(long)]
        profile: PathBuf,
        /// Corruption kind; omit for clean input.
        #[arg(long, value_enum, requires = "level")]
        kind: Option<Kind>,
        #[arg(long, requires = "kind")]
        level: Option<Level>,
        /// Comma-separated class registry (default: the 8 KITTI classes).
        #[arg(long, value_delimiter = ',')]
        classes: Option<Vec<String>>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Render a report JSON as tables.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    use clap::CommandFactory;
    Cli::command()
        .error(clap::error::ErrorKind::ValueValidation, msg)
        .exit()
}

fn check_threshold(t: Option<f64>) -> Option<f64> {
    if let Some(t) = t {
        if !(t > 0.0 && t < 1.0) {
            usage_error(format!("--iou-threshold {t} outside (0, 1)"));
        }
    }
    t
}

fn run(cli: Cli) -> Result<()> {
    let threshold = check_threshold(cli.iou_threshold);
    match cli.command {
        Command::Corrupt {
            input,
            output,
            kind,
            level,
            params,
            strict_paper_fog,
        } => {
            let spec = CorruptionSpec::new(kind.into(), level, cli.seed).unwrap_or_else(|e| usage_error(e));
            let mut params = match params {
                Some(p) => serde_json::from_str(&commands::read_to_string(&p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => CorruptionParams::default(),
            };
            if strict_paper_fog {
                params = params.strict_fog();
            }
            let sidecar = commands::corrupt(&CorruptArgs {
                input,
                output,
                spec,
                params,
                jobs: cli.jobs,
            })?;
            eprintln!("corrupted {} image(s)", sidecar.files.len());
        }
        Command::Evaluate { manifest, output } => {
            let mut m = load_manifest(&manifest)?;
            if let Some(t) = threshold {
                m.iou_threshold = t;
            }
            let doc = commands::evaluate(&m, cli.jobs)?;
            std::fs::write(&output, doc.to_json()).with_context(|| format!("writing {}", output.display()))?;
            if !doc.aggregate.is_complete() {
                let missing: Vec<String> = doc.aggregate.incomplete.iter().map(|c| c.to_string()).collect();
                eprintln!("aggregate incomplete; missing cells: {}", missing.join(", "));
            }
        }
        Command::Flip { manifest, output } => {
            let mut m = load_flip_manifest(&manifest)?;
            if let Some(t) = threshold {
                m.iou_threshold = t;
            }
            let report = commands::flip(&m)?;
            std::fs::write(&output, serde_json::to_string_pretty(&report)?)
                .with_context(|| format!("writing {}", output.display()))?;
            eprint!("{}", render_flip_text(&report));
        }
        Command::MockDetect {
            ground_truth,
            profile,
            kind,
            level,
            classes,
            output,
        } => {
            let cell = match (kind, level) {
                (Some(k), Some(l)) => CellKey::new(k.into(), l).unwrap_or_else(|e| usage_error(e)),
                _ => CellKey::Clean,
            };
            let registry = match classes {
                Some(c) => ClassRegistry::new(c).unwrap_or_else(|e| usage_error(e)),
                None => ClassRegistry::kitti(),
            };
            let records = commands::mock_detect(&MockDetectArgs {
                ground_truth,
                output,
                profile: load_profile(&profile)?,
                registry,
                cell,
                seed: cli.seed,
            })?;
            eprintln!("wrote {} prediction file(s)", records.len());
        }
        Command::Report { input, format } => {
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Csv => ReportFormat::Csv,
            };
            print!("{}", commands::report(&commands::read_to_string(&input)?, format)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
