//! Report documents (the JSON record of a run) and their table views.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use credence_core::metrics::{aggregate, FlipTally};
use credence_core::{
    AggregateReport, CellKey, ClassRegistry, CorruptionKind, EvaluationReport, Intensity, Level,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ReportError;

pub const REPORT_SCHEMA: &str = "credence-report/1";
pub const FLIP_SCHEMA: &str = "credence-flip/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Unix timestamp for new documents; `SOURCE_DATE_EPOCH` pins it.
pub fn timestamp() -> Option<u64> {
    if let Some(v) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return Some(v);
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub tool_version: String,
    pub generated_at: Option<u64>,
    pub class_registry: ClassRegistry,
    pub iou_threshold: f64,
    /// The manifest that produced this report, as loaded.
    pub manifest: Value,
    pub cells: Vec<EvaluationReport>,
    pub aggregate: AggregateReport,
}

fn check_schema(value: &Value, expected: &'static str) -> Result<(), ReportError> {
    let found = value.get("schema_version").and_then(Value::as_str).unwrap_or("<missing>");
    if found != expected {
        return Err(ReportError::SchemaMismatch {
            found: found.to_string(),
            expected,
        });
    }
    Ok(())
}

impl ReportDocument {
    /// Builds a document; cells are sorted by cell key and the aggregate is
    /// derived from them.
    pub fn new(
        class_registry: ClassRegistry,
        iou_threshold: f64,
        manifest: Value,
        mut cells: Vec<EvaluationReport>,
    ) -> Self {
        cells.sort_by_key(|c| c.cell);
        let aggregate = aggregate(&cells);
        Self {
            schema_version: REPORT_SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            generated_at: timestamp(),
            class_registry,
            iou_threshold,
            manifest,
            cells,
            aggregate,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let value: Value = serde_json::from_str(text)?;
        check_schema(&value, REPORT_SCHEMA)?;
        Ok(serde_json::from_value(value)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// True when the stored aggregate equals a recomputation from the cells.
    pub fn aggregate_is_consistent(&self) -> bool {
        let mut recomputed = aggregate(&self.cells);
        recomputed.flip_probability = self.aggregate.flip_probability;
        recomputed == self.aggregate
    }

    pub fn cell(&self, key: &CellKey) -> Option<&EvaluationReport> {
        self.cells.iter().find(|c| c.cell == *key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipCellReport {
    pub name: String,
    pub sequences: u64,
    pub objects: u64,
    pub flips: u64,
    pub transitions: u64,
    /// `None` when the cell has no ground-truth objects.
    pub flip_probability: Option<f64>,
}

impl FlipCellReport {
    pub fn from_tally(name: String, t: FlipTally) -> Self {
        Self {
            name,
            sequences: t.sequences,
            objects: t.objects,
            flips: t.flips,
            transitions: t.transitions,
            flip_probability: t.probability().ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipReport {
    pub schema_version: String,
    pub tool_version: String,
    pub generated_at: Option<u64>,
    pub iou_threshold: f64,
    pub cells: Vec<FlipCellReport>,
    /// Pooled over every object of every cell.
    pub overall: Option<f64>,
}

impl FlipReport {
    pub fn new(iou_threshold: f64, cells: Vec<FlipCellReport>) -> Self {
        let (flips, transitions) = cells
            .iter()
            .fold((0, 0), |(f, t), c| (f + c.flips, t + c.transitions));
        Self {
            schema_version: FLIP_SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            generated_at: timestamp(),
            iou_threshold,
            cells,
            overall: (transitions > 0).then(|| flips as f64 / transitions as f64),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let value: Value = serde_json::from_str(text)?;
        check_schema(&value, FLIP_SCHEMA)?;
        Ok(serde_json::from_value(value)?)
    }
}

/// One class row of a per-corruption AP table.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceRow {
    pub class: String,
    pub ap: [Option<f64>; 3],
    /// AP at low minus AP at high.
    pub difference: Option<f64>,
    /// Among the three largest differences for this corruption.
    pub top3: bool,
}

pub fn difference_table(doc: &ReportDocument, kind: CorruptionKind) -> Vec<DifferenceRow> {
    let ap_of = |class: &credence_core::ClassId, i: Intensity| {
        let key = CellKey::Corrupted {
            kind,
            level: Level::Intensity(i),
        };
        doc.cell(&key).and_then(|c| c.per_class_ap.get(class).copied())
    };
    let mut rows: Vec<DifferenceRow> = doc
        .class_registry
        .classes()
        .map(|class| {
            let ap = Intensity::ALL.map(|i| ap_of(&class, i));
            DifferenceRow {
                class: class.to_string(),
                difference: ap[0].zip(ap[2]).map(|(lo, hi)| lo - hi),
                ap,
                top3: false,
            }
        })
        .collect();
    let mut ranked: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].difference.is_some()).collect();
    ranked.sort_by(|&a, &b| rows[b].difference.unwrap().total_cmp(&rows[a].difference.unwrap()));
    for &i in ranked.iter().take(3) {
        rows[i].top3 = true;
    }
    rows
}

fn weather_kinds_present(doc: &ReportDocument) -> Vec<CorruptionKind> {
    CorruptionKind::WEATHER
        .into_iter()
        .filter(|k| {
            doc.cells
                .iter()
                .any(|c| matches!(c.cell, CellKey::Corrupted { kind, .. } if kind == *k))
        })
        .collect()
}

fn fmt3(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

pub fn render_text(doc: &ReportDocument) -> String {
    let mut s = String::new();
    for kind in weather_kinds_present(doc) {
        let _ = writeln!(s, "Average precision: {kind}");
        let _ = writeln!(s, "{:<16}{:>8}{:>8}{:>8}{:>12}", "Class", "Low", "Medium", "High", "Difference");
        for r in difference_table(doc, kind) {
            let _ = writeln!(
                s,
                "{:<16}{:>8}{:>8}{:>8}{:>12}{}",
                r.class,
                fmt3(r.ap[0]),
                fmt3(r.ap[1]),
                fmt3(r.ap[2]),
                fmt3(r.difference),
                if r.top3 { " *" } else { "" }
            );
        }
        s.push('\n');
    }

    if !weather_kinds_present(doc).is_empty() {
        let _ = writeln!(s, "mAP by corruption");
        let _ = writeln!(s, "{:<16}{:>8}{:>8}{:>8}{:>8}", "Corruption", "Low", "Medium", "High", "CmAP");
        for kind in CorruptionKind::WEATHER {
            let maps = Intensity::ALL.map(|i| {
                doc.cell(&CellKey::Corrupted {
                    kind,
                    level: Level::Intensity(i),
                })
                .and_then(|c| c.map)
            });
            let _ = writeln!(
                s,
                "{:<16}{:>8}{:>8}{:>8}{:>8}",
                kind.to_string(),
                fmt3(maps[0]),
                fmt3(maps[1]),
                fmt3(maps[2]),
                fmt3(doc.aggregate.cmap.get(&kind).copied())
            );
        }
        match doc.aggregate.mcmap {
            Some(m) => {
                let _ = writeln!(s, "MCmAP: {m:.3}");
            }
            None => {
                let missing: Vec<String> = doc.aggregate.incomplete.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(s, "MCmAP: incomplete (missing: {})", missing.join(", "));
            }
        }
        s.push('\n');
    }

    let _ = writeln!(
        s,
        "{:<20}{:>8}{:>8}{:>10}{:>8}{:>8}{:>8}{:>10}",
        "Cell", "Images", "mAP", "AvgConf", "TP", "FP", "FN", "MisclsErr"
    );
    for c in &doc.cells {
        let _ = writeln!(
            s,
            "{:<20}{:>8}{:>8}{:>10}{:>8}{:>8}{:>8}{:>10}",
            c.cell.to_string(),
            c.images,
            fmt3(c.map),
            fmt3(c.avg_confidence),
            c.counts.tp,
            c.counts.fp,
            c.counts.fn_,
            fmt3(c.misclassification_error)
        );
    }
    s
}

/// One row of the long-format CSV view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub section: String,
    pub cell: String,
    pub class: String,
    pub value: f64,
    pub top3: String,
}

impl CsvRow {
    fn new(section: &str, cell: impl ToString, class: &str, value: f64) -> Self {
        Self {
            section: section.into(),
            cell: cell.to_string(),
            class: class.into(),
            value,
            top3: String::new(),
        }
    }
}

/// Long-format rows: `section,cell,class,value,top3`. Undefined metrics are omitted.
pub fn csv_rows(doc: &ReportDocument) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    for c in &doc.cells {
        for class in doc.class_registry.classes() {
            if let Some(ap) = c.per_class_ap.get(&class) {
                rows.push(CsvRow::new("ap", c.cell, class.as_str(), *ap));
            }
        }
        let scalars = [
            ("map", c.map),
            ("avg_confidence", c.avg_confidence),
            ("misclassification_error", c.misclassification_error),
            ("tp", Some(c.counts.tp as f64)),
            ("tn", Some(c.counts.tn as f64)),
            ("fp", Some(c.counts.fp as f64)),
            ("fn", Some(c.counts.fn_ as f64)),
        ];
        for (section, v) in scalars {
            if let Some(v) = v {
                rows.push(CsvRow::new(section, c.cell, "", v));
            }
        }
    }
    for kind in weather_kinds_present(doc) {
        for r in difference_table(doc, kind) {
            if let Some(d) = r.difference {
                let mut row = CsvRow::new("difference", kind, &r.class, d);
                row.top3 = r.top3.to_string();
                rows.push(row);
            }
        }
    }
    for (kind, v) in &doc.aggregate.cmap {
        rows.push(CsvRow::new("cmap", kind, "", *v));
    }
    if let Some(m) = doc.aggregate.mcmap {
        rows.push(CsvRow::new("mcmap", "", "", m));
    }
    rows
}

pub fn render_csv(doc: &ReportDocument) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["section", "cell", "class", "value", "top3"])?;
    for r in csv_rows(doc) {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, ReportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn render_flip_text(report: &FlipReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<20}{:>10}{:>10}{:>10}{:>12}{:>10}", "Cell", "Sequences", "Objects", "Flips", "Transitions", "FlipProb");
    for c in &report.cells {
        let _ = writeln!(
            s,
            "{:<20}{:>10}{:>10}{:>10}{:>12}{:>10}",
            c.name,
            c.sequences,
            c.objects,
            c.flips,
            c.transitions,
            c.flip_probability.map_or("undefined".into(), |p| format!("{p:.4}"))
        );
    }
    if let Some(o) = report.overall {
        let _ = writeln!(s, "Overall flip probability: {o:.4}");
    }
    s
}

/// Cell lookup keyed by display name, for CSV consumers.
pub fn cells_by_name(doc: &ReportDocument) -> BTreeMap<String, &EvaluationReport> {
    doc.cells.iter().map(|c| (c.cell.to_string(), c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use credence_core::{ClassId, Counts};
    use proptest::prelude::*;

    fn cell_report(kind: CorruptionKind, i: Intensity, aps: &[f64]) -> EvaluationReport {
        let registry = ClassRegistry::kitti();
        let per_class_ap: BTreeMap<ClassId, f64> = registry.classes().zip(aps.iter().copied()).collect();
        EvaluationReport {
            cell: CellKey::weather(kind, i).unwrap(),
            images: 1,
            map: Some(aps.iter().sum::<f64>() / aps.len() as f64),
            per_class_ap,
            excluded_classes: Vec::new(),
            avg_confidence: Some(0.1 + 0.2),
            counts: Counts { tp: 3, tn: 0, fp: 1, fn_: 2 },
            misclassification_error: Some(0.5),
        }
    }

    fn grid(aps: [f64; 3]) -> ReportDocument {
        let cells = CorruptionKind::WEATHER
            .into_iter()
            .flat_map(|k| Intensity::ALL.into_iter().zip(aps).map(move |(i, a)| cell_report(k, i, &[a, a / 3.0])))
            .collect();
        ReportDocument::new(ClassRegistry::kitti(), 0.5, serde_json::json!({"cells": []}), cells)
    }

    #[test]
    fn json_round_trip_keeps_every_bit() {
        let doc = grid([0.39075000000000004, 0.1 + 0.2, 1.0 / 3.0]);
        let back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(back.aggregate_is_consistent());
    }

    #[test]
    fn schema_mismatch_names_both_versions() {
        let text = grid([0.5; 3]).to_json().replace(REPORT_SCHEMA, "credence-report/0");
        let err = ReportDocument::from_json(&text).unwrap_err();
        assert!(matches!(err, ReportError::SchemaMismatch { .. }));
        let msg = err.to_string();
        assert!(msg.contains("credence-report/0") && msg.contains(REPORT_SCHEMA), "{msg}");
    }

    #[test]
    fn tampered_aggregate_detected() {
        let mut doc = grid([0.9, 0.5, 0.2]);
        assert!(doc.aggregate_is_consistent());
        doc.aggregate.mcmap = Some(2.0);
        assert!(!doc.aggregate_is_consistent());
    }

    #[test]
    fn difference_marks_three_largest() {
        let registry = ClassRegistry::kitti();
        let lows = [0.9, 0.8, 0.7, 0.6];
        let highs = [0.1, 0.75, 0.0, 0.3];
        let mut cells = Vec::new();
        for (i, aps) in [(Intensity::Low, &lows), (Intensity::Medium, &lows), (Intensity::High, &highs)] {
            cells.push(cell_report(CorruptionKind::Fog, i, aps));
        }
        let doc = ReportDocument::new(registry, 0.5, Value::Null, cells);
        let rows = difference_table(&doc, CorruptionKind::Fog);
        let marked: Vec<&str> = rows.iter().filter(|r| r.top3).map(|r| r.class.as_str()).collect();
        assert_eq!(marked, ["Pedestrian", "Car", "Van"]);
        assert!(rows[4].difference.is_none(), "class without AP has no difference");
    }

    #[test]
    fn empty_document_renders_headers_only() {
        let doc = ReportDocument::new(ClassRegistry::kitti(), 0.5, Value::Null, Vec::new());
        assert_eq!(render_csv(&doc).unwrap(), "section,cell,class,value,top3\n");
        let text = render_text(&doc);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("Cell"));
    }

    #[test]
    fn incomplete_grid_named_in_text() {
        let mut doc = grid([0.9, 0.5, 0.2]);
        doc.cells.retain(|c| c.cell.to_string() != "snow/high");
        doc.aggregate = aggregate(&doc.cells);
        assert!(render_text(&doc).contains("MCmAP: incomplete (missing: snow/high)"));
    }

    proptest! {
        #[test]
        fn csv_round_trips_arbitrary_values(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let doc = grid([a, b, c]);
            let rows = parse_csv(&render_csv(&doc).unwrap()).unwrap();
            prop_assert_eq!(rows, csv_rows(&doc));
            let back = ReportDocument::from_json(&doc.to_json()).unwrap();
            prop_assert_eq!(back, doc);
        }
    }
}
