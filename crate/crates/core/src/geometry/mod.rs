//! Planar convex geometry: polygons, ellipses, enclosing ellipses and
//! containment/dilation queries.
//!
//! Tolerances are relative to the diameter of the body being examined so
//! that every predicate is invariant under the `h^{1/2}` rescalings used by
//! the section analysis.

mod ellipsoid;
mod polygon;

pub use ellipsoid::{dilation_factor, mvee, mvee_with_cap, ClipRegion, Ellipsoid, UpperHalfPlane};
pub use polygon::{convex_hull, Polytope};

use nalgebra::Vector2;

pub type Point = Vector2<f64>;

/// Default relative tolerance for polygon predicates.
pub const REL_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of triangle `(o, a, b)`; positive when counterclockwise.
#[inline]
pub(crate) fn orient(o: Point, a: Point, b: Point) -> f64 {
    cross(a - o, b - o)
}

pub(crate) fn diameter(points: &[Point]) -> f64 {
    // Exact for small sets; bounding-box diagonal bounds it within sqrt(2).
    if points.len() <= 64 {
        let mut d: f64 = 0.0;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    } else {
        let (lo, hi) = bounding_box(points);
        (hi - lo).norm()
    }
}

pub(crate) fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Distance from `p` to the segment `[a, b]`.
pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
