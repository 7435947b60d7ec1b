use credence::commands::{self, ReportFormat};
use credence::load_manifest;
use credence::report::difference_table;
use credence_core::CorruptionKind;

use crate::*;

fn reference_doc() -> (tempfile::TempDir, credence::ReportDocument) {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_reference_grid(tmp.path()).unwrap();
    let doc = commands::evaluate(&load_manifest(&manifest).unwrap(), None).unwrap();
    (tmp, doc)
}

#[test]
fn fog_difference_column_and_marks() {
    let (_tmp, doc) = reference_doc();
    let rows = difference_table(&doc, CorruptionKind::Fog);
    for (row, want) in rows.iter().zip(REFERENCE_FOG_DIFFERENCE) {
        assert!((row.difference.unwrap() - want).abs() < 1e-9, "{row:?}");
    }
    let marked: Vec<&str> = rows.iter().filter(|r| r.top3).map(|r| r.class.as_str()).collect();
    assert_eq!(marked, REFERENCE_FOG_TOP3);
}

#[test]
fn grid_aggregate_mcmap() {
    let (_tmp, doc) = reference_doc();
    assert!(doc.aggregate.is_complete());
    assert!(doc.aggregate_is_consistent());
    let mcmap = doc.aggregate.mcmap.unwrap();
    assert!((mcmap - REFERENCE_MCMAP).abs() <= 0.002, "{mcmap}");
}

#[test]
fn text_report_marks_top_three() {
    let (_tmp, doc) = reference_doc();
    let text = commands::report(&doc.to_json(), ReportFormat::Text).unwrap();
    let fog: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("Average precision: fog"))
        .take(10)
        .filter(|l| l.contains('*'))
        .collect();
    assert_eq!(fog.len(), 3, "{text}");
    assert!(fog.iter().any(|l| l.contains("0.797")));
}

#[test]
fn csv_matches_json_values() {
    let (_tmp, doc) = reference_doc();
    let csv = commands::report(&doc.to_json(), ReportFormat::Csv).unwrap();
    let rows = credence::report::parse_csv(&csv).unwrap();
    assert_eq!(rows, credence::report::csv_rows(&doc));
    assert!(rows.iter().any(|r| r.section == "mcmap"), "{csv}");
}
