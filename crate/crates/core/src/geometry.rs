//! Plain geometric types and the object-to-rectangle / circle-to-MBR
//! transformations.
//!
//! Region semantics are strictly open everywhere: a point on the boundary of
//! a rectangle or circle is not covered. Every sweep decision downstream is
//! built on this single convention.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }
}

/// An input point with a non-negative weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedObject {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl WeightedObject {
    pub fn new(x: f64, y: f64, w: f64) -> WeightedObject {
        WeightedObject { x, y, w }
    }

    pub fn point(&self) -> Point {
        Point { x: self.x, y: self.y }
    }
}

/// An open axis-aligned rectangle (x1, x2) x (y1, y2) with a weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedRect {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub w: f64,
}

impl WeightedRect {
    /// True iff `p` lies strictly inside the rectangle.
    pub fn covers(&self, p: Point) -> bool {
        self.x1 < p.x && p.x < self.x2 && self.y1 < p.y && p.y < self.y2
    }
}

/// An open disk given by center and diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCircle {
    pub cx: f64,
    pub cy: f64,
    pub d: f64,
    pub w: f64,
}

impl WeightedCircle {
    /// True iff `p` lies strictly inside the disk (boundary excluded).
    pub fn covers(&self, p: Point) -> bool {
        let dx = p.x - self.cx;
        let dy = p.y - self.cy;
        let r = self.d / 2.0;
        dx * dx + dy * dy < r * r
    }

    /// Minimum bounding rectangle: the open d x d square around the center.
    pub fn mbr(&self) -> WeightedRect {
        let r = self.d / 2.0;
        WeightedRect {
            x1: self.cx - r,
            x2: self.cx + r,
            y1: self.cy - r,
            y2: self.cy + r,
            w: self.w,
        }
    }
}

/// Replaces an object by the open d1 x d2 rectangle centered on it.
///
/// A point p is covered by the result iff the d1 x d2 query rectangle
/// centered at p covers the object, so maximizing overlap of these
/// rectangles solves the original placement problem.
pub fn rect_of_object(o: &WeightedObject, d1: f64, d2: f64) -> Result<WeightedRect> {
    let valid = |d: f64| d.is_finite() && d > 0.0;
    if !valid(d1) || !valid(d2) {
        return Err(Error::InvalidParameter(format!(
            "rectangle extents must be positive, got {d1} x {d2}"
        )));
    }
    Ok(WeightedRect {
        x1: o.x - d1 / 2.0,
        x2: o.x + d1 / 2.0,
        y1: o.y - d2 / 2.0,
        y2: o.y + d2 / 2.0,
        w: o.w,
    })
}

/// Sum of the weights of all rectangles that cover `p`.
pub fn location_weight(rects: &[WeightedRect], p: Point) -> f64 {
    rects.iter().filter(|r| r.covers(p)).map(|r| r.w).sum()
}
