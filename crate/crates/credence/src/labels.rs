//! KITTI 2D label files.
//!
//! One object per line, at least 15 whitespace-separated fields:
//! `type truncated occluded alpha left top right bottom h w l x y z rot_y [score]`.
//! Only `type` and the four box corners are used. `DontCare` lines are skipped.

use credence_core::{BBox, ClassRegistry, GroundTruthBox};

use crate::error::{decode_utf8, LineError, ParseError};

pub const KITTI_MIN_FIELDS: usize = 15;
pub const KITTI_MAX_FIELDS: usize = 16;
const DONT_CARE: &str = "DontCare";

pub fn parse_kitti_labels(
    text: &str,
    registry: &ClassRegistry,
) -> Result<Vec<GroundTruthBox>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !(KITTI_MIN_FIELDS..=KITTI_MAX_FIELDS).contains(&fields.len()) {
            return Err(ParseError::new(
                line,
                LineError::FieldCount {
                    expected: "15 or 16",
                    found: fields.len(),
                },
            ));
        }
        let mut numbers = [0.0f64; KITTI_MAX_FIELDS];
        for (k, f) in fields.iter().enumerate().skip(1) {
            numbers[k] = parse_number(f, k + 1, line)?;
        }
        if fields[0] == DONT_CARE {
            continue;
        }
        let class = registry
            .resolve(fields[0])
            .map_err(|_| ParseError::new(line, LineError::UnknownClass(fields[0].to_string())))?;
        let bbox = BBox::new(numbers[4], numbers[5], numbers[6], numbers[7])
            .map_err(|e| ParseError::new(line, LineError::InvalidBox(e)))?;
        out.push(GroundTruthBox::new(class, bbox));
    }
    Ok(out)
}

/// Parses raw bytes, rejecting invalid UTF-8 with its line number.
pub fn parse_kitti_labels_bytes(
    bytes: &[u8],
    registry: &ClassRegistry,
) -> Result<Vec<GroundTruthBox>, ParseError> {
    parse_kitti_labels(decode_utf8(bytes)?, registry)
}

pub(crate) fn parse_number(text: &str, field: usize, line: usize) -> Result<f64, ParseError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(
            line,
            LineError::BadNumber {
                field,
                text: text.chars().take(32).collect(),
            },
        )),
    }
}

/// Renders boxes as KITTI lines with zeroed 3-D fields.
pub fn write_kitti_labels(boxes: &[GroundTruthBox]) -> String {
    let mut s = String::new();
    for b in boxes {
        let bb = &b.bbox;
        s.push_str(&format!(
            "{} 0.00 0 0.00 {} {} {} {} 0.00 0.00 0.00 0.00 0.00 0.00 0.00\n",
            b.class,
            bb.left(),
            bb.top(),
            bb.right(),
            bb.bottom()
        ));
    }
    s
}
