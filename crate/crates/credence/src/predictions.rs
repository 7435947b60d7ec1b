//! Prediction files: one detection per line.
//!
//! ```text
//! file       = { line "\n" }
//! line       = [ record ] [ "#" comment ]
//! record     = class WS confidence WS left WS top WS right WS bottom
//! ```
//!
//! `class` is a registry name; numbers use decimal float syntax and must be
//! finite; `confidence` must lie in `[0, 1]`. Blank lines and `#` comments
//! are ignored, except a leading `# provenance: <cell> seed <n>` or
//! `# provenance: clean` comment, which records how the input was produced.

use std::fmt;

use credence_core::{
    BBox, CellKey, ClassRegistry, CorruptionSpec, Detection, DetectionError,
};
use serde::{Deserialize, Serialize};

use crate::error::{decode_utf8, LineError, ParseError};
use crate::labels::parse_number;

const PROVENANCE_TAG: &str = "provenance:";

/// Where a prediction file's input came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Clean,
    Corrupted(CorruptionSpec),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Clean => f.write_str("clean"),
            Provenance::Corrupted(s) => write!(f, "{} seed {}", s.cell(), s.seed()),
        }
    }
}

impl Provenance {
    fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text == "clean" {
            return Ok(Provenance::Clean);
        }
        let mut it = text.split_whitespace();
        let (Some(cell), Some("seed"), Some(seed), None) = (it.next(), it.next(), it.next(), it.next())
        else {
            return Err(text.chars().take(64).collect());
        };
        let cell: CellKey = cell.parse().map_err(|e| format!("{e}"))?;
        let seed: u64 = seed.parse().map_err(|_| format!("bad seed '{seed}'"))?;
        match cell {
            CellKey::Clean => Err("clean provenance takes no seed".into()),
            CellKey::Corrupted { kind, level } => CorruptionSpec::new(kind, level, seed)
                .map(Provenance::Corrupted)
                .map_err(|e| format!("{e}")),
        }
    }

    pub fn cell(&self) -> CellKey {
        match self {
            Provenance::Clean => CellKey::Clean,
            Provenance::Corrupted(s) => s.cell(),
        }
    }
}

/// Detections for one image plus their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub image_id: String,
    pub detections: Vec<Detection>,
    pub provenance: Option<Provenance>,
}

impl PredictionRecord {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(p) = &self.provenance {
            s.push_str(&format!("# {PROVENANCE_TAG} {p}\n"));
        }
        s.push_str(&write_predictions(&self.detections));
        s
    }

    pub fn parse(image_id: &str, text: &str, registry: &ClassRegistry) -> Result<Self, ParseError> {
        let mut provenance = None;
        for (i, line) in text.lines().enumerate() {
            let t = line.trim_start();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#').map(str::trim_start) {
                if let Some(p) = rest.strip_prefix(PROVENANCE_TAG) {
                    provenance = Some(
                        Provenance::parse(p)
                            .map_err(|e| ParseError::new(i + 1, LineError::Provenance(e)))?,
                    );
                }
            }
            break;
        }
        Ok(Self {
            image_id: image_id.to_string(),
            detections: parse_predictions(text, registry)?,
            provenance,
        })
    }
}

pub fn parse_predictions(text: &str, registry: &ClassRegistry) -> Result<Vec<Detection>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split_once('#').map_or(raw, |(c, _)| c);
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 6 {
            return Err(ParseError::new(
                line,
                LineError::FieldCount {
                    expected: "6",
                    found: fields.len(),
                },
            ));
        }
        let mut nums = [0.0f64; 5];
        for (k, f) in fields[1..].iter().enumerate() {
            nums[k] = parse_number(f, k + 2, line)?;
        }
        let class = registry
            .resolve(fields[0])
            .map_err(|_| ParseError::new(line, LineError::UnknownClass(fields[0].to_string())))?;
        let bbox = BBox::new(nums[1], nums[2], nums[3], nums[4])
            .map_err(|e| ParseError::new(line, LineError::InvalidBox(e)))?;
        let det = Detection::new(class, bbox, nums[0]).map_err(|e| match e {
            DetectionError::ConfidenceRange(c) => ParseError::new(line, LineError::ConfidenceRange(c)),
        })?;
        out.push(det);
    }
    Ok(out)
}

/// Parses raw bytes, rejecting invalid UTF-8 with its line number.
pub fn parse_predictions_bytes(
    bytes: &[u8],
    registry: &ClassRegistry,
) -> Result<Vec<Detection>, ParseError> {
    parse_predictions(decode_utf8(bytes)?, registry)
}

/// Renders detections using shortest round-trip float formatting.
pub fn write_predictions(detections: &[Detection]) -> String {
    let mut s = String::new();
    for d in detections {
        let b = d.bbox();
        s.push_str(&format!(
            "{} {} {} {} {} {}\n",
            d.class(),
            d.confidence(),
            b.left(),
            b.top(),
            b.right(),
            b.bottom()
        ));
    }
    s
}
