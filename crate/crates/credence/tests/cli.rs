use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use credence::{write_image, write_kitti_labels, FlipReport, ReportDocument};
use credence_core::{BBox, ClassRegistry, GroundTruthBox, Raster};
use tempfile::TempDir;

fn credence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_credence"))
        .args(args)
        .env_remove("CREDENCE_MANIFEST")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("run credence")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_images(dir: &Path, n: usize) {
    fs::create_dir_all(dir).unwrap();
    for i in 0..n {
        let mut img = Raster::filled(24, 16, [40, 80 + 10 * i as u8, 120]).unwrap();
        img.set(3, 3, [250, 10, 10]);
        let ext = if i % 2 == 0 { "png" } else { "ppm" };
        write_image(&img, &dir.join(format!("img{i}.{ext}"))).unwrap();
    }
}

fn car(l: f64) -> GroundTruthBox {
    let reg = ClassRegistry::kitti();
    GroundTruthBox::new(reg.resolve("Car").unwrap(), BBox::new(l, 10.0, l + 20.0, 30.0).unwrap())
}

fn write_labels(dir: &Path, n: usize) {
    fs::create_dir_all(dir).unwrap();
    for i in 0..n {
        let boxes = vec![car(0.0), car(40.0 + i as f64)];
        fs::write(dir.join(format!("{i:03}.txt")), write_kitti_labels(&boxes)).unwrap();
    }
}

fn write_profile(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("profile.json");
    fs::write(&path, json).unwrap();
    path
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

// ------------------------------------------------------------ corrupt --

#[test]
fn corrupt_writes_outputs_and_sidecar() {
    let tmp = TempDir::new().unwrap();
    let (input, out) = (tmp.path().join("in"), tmp.path().join("out"));
    write_images(&input, 3);
    let o = credence(&["corrupt", "--input", p(&input), "--output", p(&out), "--kind", "fog", "--level", "high", "--seed", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let names: Vec<String> = read_dir_sorted(&out).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["corruptions.json", "img0.png", "img1.ppm", "img2.png"]);
    let sidecar: serde_json::Value = serde_json::from_slice(&fs::read(out.join("corruptions.json")).unwrap()).unwrap();
    let files = sidecar["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    assert!(files.iter().all(|f| f["spec"]["kind"] == "fog" && f["spec"]["level"] == "high"));
    // Per-image seeds are derived, hence distinct.
    assert_ne!(files[0]["spec"]["seed"], files[1]["spec"]["seed"]);
}

#[test]
fn corrupt_is_byte_identical_on_rerun() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("in");
    write_images(&input, 4);
    let run = |name: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let o = credence(&[
            "corrupt", "--input", p(&input), "--output", p(&out), "--kind", "gaussian_noise", "--level", "4",
            "--seed", "3", "--jobs", jobs,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        read_dir_sorted(&out)
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "4"), "worker count must not change output");
}

#[test]
fn corrupt_rejects_unknown_kind_listing_valid_ones() {
    let tmp = TempDir::new().unwrap();
    let o = credence(&["corrupt", "--input", p(tmp.path()), "--output", "x", "--kind", "rain", "--level", "low"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for kind in ["gaussian_noise", "gaussian_blur", "fog", "sunflare", "snow"] {
        assert!(err.contains(kind), "{err}");
    }
}

#[test]
fn corrupt_rejects_degree_for_weather() {
    let tmp = TempDir::new().unwrap();
    let o = credence(&["corrupt", "--input", p(tmp.path()), "--output", "x", "--kind", "fog", "--level", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degree not valid for weather corruption 'fog'"), "{}", stderr(&o));
}

#[test]
fn corrupt_with_unreadable_input_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let (input, out) = (tmp.path().join("in"), tmp.path().join("out"));
    write_images(&input, 2);
    fs::write(input.join("broken.png"), b"\x89PNG\r\n\x1a\nnot really").unwrap();
    fs::write(input.join("empty.ppm"), b"").unwrap();
    let o = credence(&["corrupt", "--input", p(&input), "--output", p(&out), "--kind", "snow", "--level", "low"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("broken.png") && err.contains("empty.ppm"), "{err}");
    assert!(!out.exists() || read_dir_sorted(&out).is_empty());
}

#[test]
fn strict_fog_differs_from_default_fog() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("in");
    write_images(&input, 1);
    let run = |name: &str, strict: bool| {
        let out = tmp.path().join(name);
        let mut args = vec!["corrupt", "--input", p(&input), "--output", p(&out), "--kind", "fog", "--level", "low"];
        if strict {
            args.push("--strict-paper-fog");
        }
        assert!(credence(&args).status.success());
        fs::read(out.join("img0.png")).unwrap()
    };
    assert_ne!(run("default", false), run("strict", true));
}

// -------------------------------------------------------- mock-detect --

#[test]
fn mock_detect_zero_rates_reproduces_truth() {
    let tmp = TempDir::new().unwrap();
    let (gt, out) = (tmp.path().join("gt"), tmp.path().join("pred"));
    write_labels(&gt, 2);
    let profile = write_profile(tmp.path(), r#"{"base_confidence": 0.9, "confidence_decay": 0.2, "label_flip_rate": 0, "drop_rate": 0, "bbox_jitter": 0}"#);
    let o = credence(&["mock-detect", "--ground-truth", p(&gt), "--profile", p(&profile), "--output", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("000.txt")).unwrap();
    assert_eq!(text, "# provenance: clean\nCar 0.9 0 10 20 30\nCar 0.9 40 10 60 30\n");
}

#[test]
fn mock_detect_same_seed_same_files() {
    let tmp = TempDir::new().unwrap();
    let gt = tmp.path().join("gt");
    write_labels(&gt, 5);
    let profile = write_profile(
        tmp.path(),
        r#"{"profile": {"base_confidence": 0.9, "confidence_decay": 0.3, "label_flip_rate": 0.5, "drop_rate": 0.3, "bbox_jitter": 2, "confidence_jitter": 0.05}}"#,
    );
    let run = |name: &str, seed: &str| {
        let out = tmp.path().join(name);
        let o = credence(&[
            "mock-detect", "--ground-truth", p(&gt), "--profile", p(&profile), "--kind", "gaussian_blur", "--level", "4",
            "--seed", seed, "--output", p(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        read_dir_sorted(&out)
    };
    let a = run("a", "7");
    assert_eq!(a, run("b", "7"));
    assert_ne!(a, run("c", "8"));
    assert!(String::from_utf8_lossy(&a[0].1).starts_with("# provenance: gaussian_blur/4 seed 7\n"));
}

#[test]
fn mock_detect_full_drop_gives_empty_files() {
    let tmp = TempDir::new().unwrap();
    let (gt, out) = (tmp.path().join("gt"), tmp.path().join("pred"));
    write_labels(&gt, 3);
    let profile = write_profile(tmp.path(), r#"{"base_confidence": 0.9, "confidence_decay": 0.2, "label_flip_rate": 0, "drop_rate": 1, "bbox_jitter": 0}"#);
    let o = credence(&[
        "mock-detect", "--ground-truth", p(&gt), "--profile", p(&profile), "--kind", "snow", "--level", "high", "--output", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for (_, bytes) in read_dir_sorted(&out) {
        assert_eq!(String::from_utf8(bytes).unwrap(), "# provenance: snow/high seed 0\n");
    }
}

#[test]
fn mock_detect_reports_bad_label_line() {
    let tmp = TempDir::new().unwrap();
    let gt = tmp.path().join("gt");
    write_labels(&gt, 1);
    fs::write(gt.join("bad.txt"), "Car 0 0 0 1 2 3 4 0 0 0 0 0 0 0\nCar 0 0 0 oops 2 3 4 0 0 0 0 0 0 0\n").unwrap();
    let profile = write_profile(tmp.path(), r#"{"base_confidence": 0.9, "confidence_decay": 0, "label_flip_rate": 0, "drop_rate": 0, "bbox_jitter": 0}"#);
    let o = credence(&["mock-detect", "--ground-truth", p(&gt), "--profile", p(&profile), "--output", p(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
}

// ----------------------------------------------------------- evaluate --

/// Ground truth plus identical predictions for a set of weather cells.
fn evaluation_fixture(tmp: &Path, cells: &[(&str, &str)]) -> PathBuf {
    let gt = tmp.join("gt");
    write_labels(&gt, 2);
    let profile = write_profile(tmp, r#"{"base_confidence": 0.8, "confidence_decay": 0.1, "label_flip_rate": 0, "drop_rate": 0, "bbox_jitter": 0}"#);
    let mut entries = Vec::new();
    for (kind, level) in cells {
        let name = format!("{kind}_{level}");
        let o = credence(&[
            "mock-detect", "--ground-truth", p(&gt), "--profile", p(&profile), "--kind", kind, "--level", level,
            "--output", p(&tmp.join(&name)),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        entries.push(serde_json::json!({"kind": kind, "level": level, "predictions": name, "ground_truth": "gt"}));
    }
    let manifest = tmp.join("manifest.json");
    fs::write(&manifest, serde_json::json!({"cells": entries}).to_string()).unwrap();
    manifest
}

const GRID: [(&str, &str); 9] = [
    ("fog", "low"),
    ("fog", "medium"),
    ("fog", "high"),
    ("sunflare", "low"),
    ("sunflare", "medium"),
    ("sunflare", "high"),
    ("snow", "low"),
    ("snow", "medium"),
    ("snow", "high"),
];

#[test]
fn evaluate_full_grid_has_nine_cells_and_aggregate() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID);
    let out = tmp.path().join("report.json");
    let o = credence(&["evaluate", "--manifest", p(&manifest), "--output", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = ReportDocument::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.cells.len(), 9);
    assert!(doc.aggregate.is_complete());
    assert_eq!(doc.aggregate.mcmap, Some(3.0));
    assert!(doc.aggregate_is_consistent());
    assert_eq!(doc.generated_at, Some(1_700_000_000));
}

#[test]
fn evaluate_names_missing_cells() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID[..8]);
    let out = tmp.path().join("report.json");
    let o = credence(&["evaluate", "--manifest", p(&manifest), "--output", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("snow/high"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["aggregate"]["incomplete"], serde_json::json!(["snow/high"]));
    assert_eq!(json["aggregate"]["mcmap"], serde_json::Value::Null);
    assert_eq!(json["cells"].as_array().unwrap().len(), 8);
}

#[test]
fn evaluate_reads_manifest_from_environment() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID[..1]);
    let out = tmp.path().join("report.json");
    let o = Command::new(env!("CARGO_BIN_EXE_credence"))
        .args(["evaluate", "--output", p(&out)])
        .env("CREDENCE_MANIFEST", &manifest)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.exists());
}

#[test]
fn evaluate_is_idempotent() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID[..3]);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        assert!(credence(&["evaluate", "--manifest", p(&manifest), "--output", p(&out)]).status.success());
        fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn evaluate_rejects_out_of_range_threshold() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID[..1]);
    let o = credence(&["evaluate", "--manifest", p(&manifest), "--output", "r.json", "--iou-threshold", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_threshold_override_changes_result() {
    let tmp = TempDir::new().unwrap();
    let gt = tmp.path().join("gt");
    write_labels(&gt, 1);
    let pred = tmp.path().join("pred");
    fs::create_dir_all(&pred).unwrap();
    // IoU with the first truth box is 15/25 = 0.6.
    fs::write(pred.join("000.txt"), "Car 0.9 5 10 25 30\n").unwrap();
    let manifest = tmp.path().join("m.json");
    fs::write(
        &manifest,
        r#"{"iou_threshold": 0.5, "cells": [{"kind": "clean", "predictions": "pred", "ground_truth": "gt"}]}"#,
    )
    .unwrap();
    let ap = |extra: &[&str]| {
        let out = tmp.path().join("r.json");
        let mut args = vec!["evaluate", "--manifest", p(&manifest), "--output", p(&out)];
        args.extend_from_slice(extra);
        assert!(credence(&args).status.success());
        let doc = ReportDocument::from_json(&fs::read_to_string(out).unwrap()).unwrap();
        doc.cells[0].map.unwrap()
    };
    assert_eq!(ap(&[]), 0.5);
    assert_eq!(ap(&["--iou-threshold", "0.7"]), 0.0);
}

#[test]
fn evaluate_reports_manifest_pointer() {
    let tmp = TempDir::new().unwrap();
    let manifest = tmp.path().join("m.json");
    fs::write(&manifest, r#"{"cells": [{"kind": "rain", "level": "low", "predictions": ".", "ground_truth": "."}]}"#).unwrap();
    let o = credence(&["evaluate", "--manifest", p(&manifest), "--output", "r.json"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("/cells/0/kind") && err.contains("sunflare"), "{err}");
}

#[test]
fn evaluate_missing_prediction_file_names_image() {
    let tmp = TempDir::new().unwrap();
    let manifest = evaluation_fixture(tmp.path(), &GRID[..1]);
    fs::remove_file(tmp.path().join("fog_low/001.txt")).unwrap();
    let o = credence(&["evaluate", "--manifest", p(&manifest), "--output", "r.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("001"), "{}", stderr(&o));
}

// --------------------------------------------------------------- flip --

fn flip_fixture(tmp: &Path, frames: &[&[&str]]) -> PathBuf {
    let gt = tmp.join("gt");
    fs::create_dir_all(&gt).unwrap();
    fs::write(gt.join("a.txt"), write_kitti_labels(&[car(0.0)])).unwrap();
    let mut names = Vec::new();
    for (j, labels) in frames.iter().enumerate() {
        let dir = tmp.join(format!("f{j}"));
        fs::create_dir_all(&dir).unwrap();
        for (i, label) in labels.iter().enumerate() {
            let id = ["a", "b"][i];
            fs::write(dir.join(format!("{id}.txt")), format!("{label} 0.9 0 10 20 30\n")).unwrap();
        }
        names.push(format!("f{j}"));
    }
    fs::create_dir_all(tmp.join("empty_gt")).unwrap();
    let manifest = tmp.join("flip.json");
    fs::write(
        &manifest,
        serde_json::json!({"cells": [
            {"name": "noise+blur", "ground_truth": "gt", "frames": names},
            {"name": "unused", "ground_truth": "empty_gt", "frames": names},
        ]})
        .to_string(),
    )
    .unwrap();
    manifest
}

#[test]
fn flip_single_sequence_and_empty_cell() {
    let tmp = TempDir::new().unwrap();
    let manifest = flip_fixture(tmp.path(), &[&["Car"], &["Car"], &["Truck"]]);
    let out = tmp.path().join("flip.json");
    let o = credence(&["flip", "--manifest", p(&manifest), "--output", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = FlipReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.cells[0].flip_probability, Some(0.5));
    assert_eq!(report.cells[1].flip_probability, None);
    assert_eq!(report.overall, Some(0.5));
}

#[test]
fn flip_repeated_predictions_is_zero() {
    let tmp = TempDir::new().unwrap();
    let manifest = flip_fixture(tmp.path(), &[&["Car"][..]; 4]);
    let out = tmp.path().join("flip.json");
    assert!(credence(&["flip", "--manifest", p(&manifest), "--output", p(&out)]).status.success());
    let report = FlipReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.cells[0].flip_probability, Some(0.0));
}

#[test]
fn flip_ragged_sequences_name_image() {
    let tmp = TempDir::new().unwrap();
    let manifest = flip_fixture(tmp.path(), &[&["Car"], &["Car"]]);
    fs::write(tmp.path().join("gt/b.txt"), write_kitti_labels(&[car(0.0)])).unwrap();
    fs::write(tmp.path().join("f0/b.txt"), "Car 0.9 0 10 20 30\n").unwrap();
    let o = credence(&["flip", "--manifest", p(&manifest), "--output", p(&tmp.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("noise+blur") && err.contains('b'), "{err}");
}

// ------------------------------------------------------------- report --

fn evaluated_report(tmp: &Path) -> PathBuf {
    let manifest = evaluation_fixture(tmp, &GRID);
    let out = tmp.join("report.json");
    assert!(credence(&["evaluate", "--manifest", p(&manifest), "--output", p(&out)]).status.success());
    out
}

#[test]
fn report_text_has_tables() {
    let tmp = TempDir::new().unwrap();
    let report = evaluated_report(tmp.path());
    let o = credence(&["report", "--input", p(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in ["Average precision: fog", "Average precision: snow", "Difference", "MCmAP"] {
        assert!(text.contains(needle), "missing {needle}:\n{text}");
    }
}

#[test]
fn report_csv_round_trips_values() {
    let tmp = TempDir::new().unwrap();
    let report = evaluated_report(tmp.path());
    let o = credence(&["report", "--input", p(&report), "--format", "csv"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("section,cell,class,value,top3\n"));
    let rows = credence::report::parse_csv(&csv).unwrap();
    let doc = ReportDocument::from_json(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rows, credence::report::csv_rows(&doc));
}

#[test]
fn report_empty_document_prints_headers() {
    let tmp = TempDir::new().unwrap();
    let manifest = tmp.path().join("m.json");
    fs::write(&manifest, r#"{"cells": []}"#).unwrap();
    let out = tmp.path().join("r.json");
    assert!(credence(&["evaluate", "--manifest", p(&manifest), "--output", p(&out)]).status.success());
    let o = credence(&["report", "--input", p(&out), "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "section,cell,class,value,top3\n");
    assert!(credence(&["report", "--input", p(&out)]).status.success());
}

#[test]
fn report_rejects_schema_mismatch() {
    let tmp = TempDir::new().unwrap();
    let report = evaluated_report(tmp.path());
    let text = fs::read_to_string(&report).unwrap().replace("credence-report/1", "credence-report/99");
    fs::write(&report, text).unwrap();
    let o = credence(&["report", "--input", p(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("credence-report/99"), "{}", stderr(&o));
}
