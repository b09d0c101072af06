//! Planar predicates, simplex measures, Delaunay triangulation and Ruppert
//! refinement.

pub mod delaunay;
pub mod metrics;
pub mod predicates;
pub mod ruppert;

pub use delaunay::{delaunay, Triangulation2D};
pub use metrics::{simplex_metrics, SimplexMetrics};
pub use predicates::{incircle, orientation, Sign};
pub use ruppert::{refine_ruppert, RefineOptions};

/// A point in the plane.
pub type Point2 = [f64; 2];

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn unit() -> Self {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            [self.x_min, self.y_min],
            [self.x_max, self.y_min],
            [self.x_max, self.y_max],
            [self.x_min, self.y_max],
        ]
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn diagonal(&self) -> f64 {
        (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }

    pub fn contains(&self, p: &Point2) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Bounding box of a point set.
    pub fn bounding(points: &[Point2]) -> Option<Self> {
        let first = points.first()?;
        let mut r = Rect::new(first[0], first[0], first[1], first[1]);
        for p in points {
            r.x_min = r.x_min.min(p[0]);
            r.x_max = r.x_max.max(p[0]);
            r.y_min = r.y_min.min(p[1]);
            r.y_max = r.y_max.max(p[1]);
        }
        Some(r)
    }
}

pub(crate) fn dist2(a: &Point2, b: &Point2) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Signed area of triangle `abc` (floating point, not exact).
pub fn signed_area(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}
