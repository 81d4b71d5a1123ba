//! Shared planar geometry: quantized rotations, placement transforms, and
//! integer pixel rectangles.

use serde::{Deserialize, Serialize};

/// Rotation quantized to the four axis-aligned orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Rotation {
    #[default]
    #[serde(rename = "0")]
    R0,
    #[serde(rename = "90")]
    R90,
    #[serde(rename = "180")]
    R180,
    #[serde(rename = "270")]
    R270,
}

impl Rotation {
    pub fn degrees(self) -> u16 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    pub fn from_degrees(deg: u16) -> Option<Rotation> {
        match deg % 360 {
            0 => Some(Rotation::R0),
            90 => Some(Rotation::R90),
            180 => Some(Rotation::R180),
            270 => Some(Rotation::R270),
            _ => None,
        }
    }

    /// Rotate a point about the origin, counter-clockwise in a y-up frame.
    pub fn apply(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Rotation::R0 => (x, y),
            Rotation::R90 => (-y, x),
            Rotation::R180 => (-x, -y),
            Rotation::R270 => (y, -x),
        }
    }

    pub fn compose(self, other: Rotation) -> Rotation {
        Rotation::from_degrees((self.degrees() + other.degrees()) % 360).unwrap()
    }
}

/// Placement of a library shape onto a sheet: optional mirror about the
/// vertical axis, then a quantized rotation, then a translation. Units are
/// whatever the surrounding context uses (millimeters for schematics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub tx: f64,
    pub ty: f64,
    pub rotation: Rotation,
    pub mirror: bool,
}

impl Transform {
    pub fn new(tx: f64, ty: f64, rotation: Rotation, mirror: bool) -> Self {
        Transform { tx, ty, rotation, mirror }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Transform::new(tx, ty, Rotation::R0, false)
    }

    /// Mirror first, rotate second, translate last.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let x = if self.mirror { -x } else { x };
        let (rx, ry) = self.rotation.apply(x, y);
        (rx + self.tx, ry + self.ty)
    }

    /// Rotation/mirror only, for direction vectors.
    pub fn apply_vector(&self, x: f64, y: f64) -> (f64, f64) {
        let x = if self.mirror { -x } else { x };
        self.rotation.apply(x, y)
    }
}

/// Axis-aligned rectangle with integer pixel coordinates, well-ordered
/// (`x0 <= x1`, `y0 <= y1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x0 + self.x1) as f64 / 2.0,
            (self.y0 + self.y1) as f64 / 2.0,
        )
    }

    pub fn is_ordered(&self) -> bool {
        self.x0 <= self.x1 && self.y0 <= self.y1
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0 as f64 && x <= self.x1 as f64 && y >= self.y0 as f64 && y <= self.y1 as f64
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1.min(other.x1);
        let y1 = self.y1.min(other.y1);
        if x0 <= x1 && y0 <= y1 {
            Some(Rect { x0, y0, x1, y1 })
        } else {
            None
        }
    }

    /// Smallest rectangle containing both.
    pub fn union_bbox(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    /// Intersection-over-union of the two areas. Rectangles with zero area
    /// never intersect with positive measure, so the result is 0 for them.
    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = match self.intersection(other) {
            Some(r) => r.area(),
            None => 0,
        };
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            return 0.0;
        }
        inter as f64 / union as f64
    }

    pub fn dilate(&self, margin: i64) -> Rect {
        Rect {
            x0: self.x0 - margin,
            y0: self.y0 - margin,
            x1: self.x1 + margin,
            y1: self.y1 + margin,
        }
    }

    /// Clamp into `[0, w] x [0, h]`.
    pub fn clamp_to(&self, w: i64, h: i64) -> Rect {
        Rect {
            x0: self.x0.clamp(0, w),
            y0: self.y0.clamp(0, h),
            x1: self.x1.clamp(0, w),
            y1: self.y1.clamp(0, h),
        }
    }

    /// Divide every coordinate by `f`, rounding outward so the scaled
    /// rectangle still covers the original region.
    pub fn downscale(&self, f: i64) -> Rect {
        Rect {
            x0: self.x0.div_euclid(f),
            y0: self.y0.div_euclid(f),
            x1: (self.x1 + f - 1).div_euclid(f),
            y1: (self.y1 + f - 1).div_euclid(f),
        }
    }
}

/// Floating-point accumulator for geometric extents; converts to an
/// outward-rounded integer [`Rect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Extent {
    pub fn empty() -> Self {
        Extent {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min_x > self.max_x || self.min_y > self.max_y
    }

    pub fn add_point(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    pub fn add_extent(&mut self, other: &Extent) {
        if !other.is_empty() {
            self.add_point(other.min_x, other.min_y);
            self.add_point(other.max_x, other.max_y);
        }
    }

    pub fn pad(&self, margin: f64) -> Extent {
        Extent {
            min_x: self.min_x - margin,
            min_y: self.min_y - margin,
            max_x: self.max_x + margin,
            max_y: self.max_y + margin,
        }
    }

    /// Outward-rounded integer rectangle.
    pub fn to_rect(&self) -> Rect {
        Rect {
            x0: self.min_x.floor() as i64,
            y0: self.min_y.floor() as i64,
            x1: self.max_x.ceil() as i64,
            y1: self.max_y.ceil() as i64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_rotates_counter_clockwise() {
        assert_eq!(Rotation::R90.apply(1.0, 0.0), (0.0, 1.0));
        assert_eq!(Rotation::R180.apply(1.0, 0.0), (-1.0, 0.0));
        assert_eq!(Rotation::R270.apply(1.0, 0.0), (0.0, -1.0));
    }

    #[test]
    fn transform_mirrors_before_rotating() {
        let t = Transform::new(0.0, 0.0, Rotation::R90, true);
        // (1, 0) -> mirror -> (-1, 0) -> R90 -> (0, -1)
        assert_eq!(t.apply(1.0, 0.0), (0.0, -1.0));
    }

    #[test]
    fn iou_identical_and_disjoint() {
        let a = Rect::new(0, 0, 100, 100);
        assert_eq!(a.iou(&a), 1.0);
        let b = Rect::new(200, 200, 300, 300);
        assert_eq!(a.iou(&b), 0.0);
    }

    #[test]
    fn iou_partial_overlap() {
        // inter 5000, union 15000
        let a = Rect::new(0, 0, 100, 100);
        let b = Rect::new(50, 0, 150, 100);
        assert!((a.iou(&b) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn downscale_rounds_outward() {
        let r = Rect::new(1, 3, 7, 9);
        let d = r.downscale(2);
        assert_eq!(d, Rect::new(0, 1, 4, 5));
    }
}
