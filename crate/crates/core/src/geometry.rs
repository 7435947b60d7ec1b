use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoxError {
    #[error("box coordinates must be finite")]
    NonFinite,
    #[error("box has zero or negative extent: left {left} right {right}, top {top} bottom {bottom}")]
    Degenerate {
        left: f64,
        top: f64,
        right: f64,
        bottom: f64,
    },
}

/// Axis-aligned box in continuous pixel coordinates.
///
/// `right` and `bottom` are exclusive for area purposes, so the area is
/// `(right - left) * (bottom - top)`. Construction rejects zero-area boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    left: f64,
    top: f64,
    right: f64,
    bottom: f64,
}

impl BBox {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Result<Self, BoxError> {
        if !(left.is_finite() && top.is_finite() && right.is_finite() && bottom.is_finite()) {
            return Err(BoxError::NonFinite);
        }
        if left >= right || top >= bottom {
            return Err(BoxError::Degenerate {
                left,
                top,
                right,
                bottom,
            });
        }
        Ok(Self {
            left,
            top,
            right,
            bottom,
        })
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn right(&self) -> f64 {
        self.right
    }

    pub fn bottom(&self) -> f64 {
        self.bottom
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Area of the overlap with `other`, zero when disjoint or touching.
    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = self.right.min(other.right) - self.left.max(other.left);
        let h = self.bottom.min(other.bottom) - self.top.max(other.top);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Result<Self, BoxError> {
        Self::new(
            self.left + dx,
            self.top + dy,
            self.right + dx,
            self.bottom + dy,
        )
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = BoxError;

    fn try_from([l, t, r, b]: [f64; 4]) -> Result<Self, Self::Error> {
        BBox::new(l, t, r, b)
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.left, b.top, b.right, b.bottom]
    }
}

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}
