//! Outer contours of binary masks and the discrete bending energy along them.
//!
//! A contour is the closed, one-pixel-thick, 8-connected ring of boundary
//! pixels of a foreground component. Each point's bending energy is
//! `κ² / (|v_in| + |v_out|)` with
//! `κ = 2|v_in × v_out| / (|v_in||v_out| + v_in · v_out)`, where `v_in` and
//! `v_out` are the edge vectors into and out of the point.

mod bending;
mod trace;

pub use bending::{
    bend_contours, bending_energy, bending_loss, curvature, enumerate_patterns,
    point_bending_energy, BendConfig, BendingReport, Pattern,
};
pub use trace::trace_outer_contours;

/// Integer pixel coordinate; `x` is the column, `y` the row (growing downwards).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelPoint {
    pub x: i64,
    pub y: i64,
}

impl PixelPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        PixelPoint { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        PixelPoint::new(self.x + dx, self.y + dy)
    }

    /// Chebyshev distance is exactly one.
    pub fn is_8_adjacent(self, other: PixelPoint) -> bool {
        self != other && (self.x - other.x).abs() <= 1 && (self.y - other.y).abs() <= 1
    }
}

/// Displacement between two pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeVector {
    pub dx: i64,
    pub dy: i64,
}

impl EdgeVector {
    pub const fn new(dx: i64, dy: i64) -> Self {
        EdgeVector { dx, dy }
    }

    pub fn between(from: PixelPoint, to: PixelPoint) -> Self {
        EdgeVector::new(to.x - from.x, to.y - from.y)
    }

    pub fn length(self) -> f64 {
        ((self.dx * self.dx + self.dy * self.dy) as f64).sqrt()
    }

    pub fn cross(self, other: EdgeVector) -> i64 {
        self.dx * other.dy - self.dy * other.dx
    }

    pub fn dot(self, other: EdgeVector) -> i64 {
        self.dx * other.dx + self.dy * other.dy
    }

    pub fn is_zero(self) -> bool {
        self.dx == 0 && self.dy == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourSource {
    Outer,
}

/// Ordered cyclic boundary of one 8-connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<PixelPoint>,
    pub source: ContourSource,
    /// Parallel to `points`; all zeros until bending energy is computed and
    /// for contours too short to carry curvature.
    pub per_point_be: Vec<f64>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Contours with fewer than three points carry no curvature and are left
    /// out of the image-level mean.
    pub fn is_measured(&self) -> bool {
        self.points.len() >= 3
    }

    /// Cyclic `(prev, next)` around point `i`.
    pub fn neighbors_of(&self, i: usize) -> (PixelPoint, PixelPoint) {
        let m = self.points.len();
        (self.points[(i + m - 1) % m], self.points[(i + 1) % m])
    }
}
