//! Planar triangle primitives.

use serde::{Deserialize, Serialize};

use crate::mesh::Triangulation;
use crate::{Error, Result};

/// Default relative tolerance of the area-sum membership test.
pub const DEFAULT_CONTAINS_TOL: f64 = 1e-12;

/// Triangles whose area falls below this fraction of their squared bounding-box
/// extent are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn distance(self, other: Point2) -> f64 {
        let d = self.sub(other);
        d.x.hypot(d.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(p: [f64; 2]) -> Self {
        Point2::new(p[0], p[1])
    }
}

/// Half the cross product `(b - a) × (c - a)`; positive for counter-clockwise
/// vertex order.
pub fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * b.sub(a).cross(c.sub(a))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub v1: Point2,
    pub v2: Point2,
    pub v3: Point2,
}

impl Triangle {
    pub const fn new(v1: Point2, v2: Point2, v3: Point2) -> Self {
        Self { v1, v2, v3 }
    }

    pub fn vertices(&self) -> [Point2; 3] {
        [self.v1, self.v2, self.v3]
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(self.v1, self.v2, self.v3)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn centroid(&self) -> Point2 {
        Point2::new(
            (self.v1.x + self.v2.x + self.v3.x) / 3.0,
            (self.v1.y + self.v2.y + self.v3.y) / 3.0,
        )
    }

    /// Longest edge.
    pub fn diameter(&self) -> f64 {
        self.v1
            .distance(self.v2)
            .max(self.v2.distance(self.v3))
            .max(self.v3.distance(self.v1))
    }

    fn bbox_extent(&self) -> f64 {
        let xs = [self.v1.x, self.v2.x, self.v3.x];
        let ys = [self.v1.y, self.v2.y, self.v3.y];
        let span = |v: [f64; 3]| {
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - v.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        span(xs).max(span(ys))
    }

    pub fn is_degenerate(&self) -> bool {
        let scale = self.bbox_extent();
        !(self.area() > DEGENERACY_TOL * scale * scale) || !self.area().is_finite()
    }

    pub fn check_non_degenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateTriangle {
                area: self.signed_area(),
            })
        } else {
            Ok(())
        }
    }

    /// Barycentric coordinates of `p` from the cross-product ratios
    ///
    /// ```text
    /// λ1 = (p − v3) × (v2 − v3) / D
    /// λ2 = (p − v3) × (v3 − v1) / D
    /// λ3 = (p − v1) × (v1 − v2) / D,   D = (v1 − v3) × (v2 − v3)
    /// ```
    pub fn barycentric(&self, p: Point2) -> Result<[f64; 3]> {
        self.check_non_degenerate()?;
        let Triangle { v1, v2, v3 } = *self;
        let denom = v1.sub(v3).cross(v2.sub(v3));
        let l1 = p.sub(v3).cross(v2.sub(v3)) / denom;
        let l2 = p.sub(v3).cross(v3.sub(v1)) / denom;
        let l3 = p.sub(v1).cross(v1.sub(v2)) / denom;
        Ok([l1, l2, l3])
    }

    /// Point-in-triangle test by area comparison: `p ∈ t` iff replacing each
    /// vertex by `p` in turn yields three triangles whose areas add up to `|t|`.
    /// Boundary points are inside. `tol` is relative to `|t|`.
    pub fn contains_point(&self, p: Point2, tol: f64) -> bool {
        let whole = self.area();
        let parts = signed_area(p, self.v2, self.v3).abs()
            + signed_area(self.v1, p, self.v3).abs()
            + signed_area(self.v1, self.v2, p).abs();
        parts - whole <= tol * whole
    }

    /// Image of a barycentric point.
    pub fn point_at(&self, l: [f64; 3]) -> Point2 {
        Point2::new(
            l[0] * self.v1.x + l[1] * self.v2.x + l[2] * self.v3.x,
            l[0] * self.v1.y + l[1] * self.v2.y + l[2] * self.v3.y,
        )
    }
}

/// Free-function form of [`Triangle::barycentric`].
pub fn barycentric(p: Point2, t: &Triangle) -> Result<[f64; 3]> {
    t.barycentric(p)
}

/// Free-function form of [`Triangle::contains_point`].
pub fn contains_point(t: &Triangle, p: Point2, tol: f64) -> bool {
    t.contains_point(p, tol)
}

/// `h_max`: the longest edge over all triangles of the mesh.
pub fn max_edge_length(tri: &Triangulation) -> Result<f64> {
    if tri.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(tri
        .iter()
        .map(|t| t.diameter())
        .fold(0.0_f64, f64::max))
}
