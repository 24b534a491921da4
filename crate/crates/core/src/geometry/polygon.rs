use serde::{Deserialize, Serialize};

use super::{bounding_box, cross, diameter, orient, segment_distance, Point, REL_TOL};
use crate::error::{Error, Result};

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    vertices: Vec<Point>,
}

impl Polytope {
    /// Validates strict convexity, orientation and distinctness.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolytope(format!("{n} vertices")));
        }
        let diam = diameter(&vertices);
        if !(diam > 0.0) || !diam.is_finite() {
            return Err(Error::InvalidPolytope("zero or non-finite diameter".into()));
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).norm() <= REL_TOL * diam {
                return Err(Error::InvalidPolytope(format!("duplicate vertex at index {i}")));
            }
            if orient(a, b, c) <= REL_TOL * diam * diam {
                return Err(Error::InvalidPolytope(format!(
                    "vertex {} is not strictly convex",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        bounding_box(&self.vertices)
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| cross(a, b)).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Center of mass of the uniform-density polygon.
    pub fn centroid(&self) -> Result<Point> {
        let area = self.area();
        let diam = self.diameter();
        if area <= REL_TOL * diam * diam {
            return Err(Error::ZeroArea(area));
        }
        // Triangulate from the first vertex to limit cancellation far from the origin.
        let o = self.vertices[0];
        let mut acc = Point::zeros();
        for (a, b) in self.edges() {
            let (a, b) = (a - o, b - o);
            acc += (a + b) * cross(a, b);
        }
        Ok(o + acc / (6.0 * area))
    }

    /// Closed containment with absolute slack `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let e = b - a;
            cross(e, p - a) >= -tol * e.norm()
        })
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance(&self, p: Point) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        self.boundary_distance(p)
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Points along the boundary, consecutive samples at most `step` apart.
    pub fn boundary_samples(&self, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let k = ((b - a).norm() / step).ceil().max(1.0) as usize;
            for j in 0..k {
                out.push(a + (b - a) * (j as f64 / k as f64));
            }
        }
        out
    }

    /// Image under `x -> m x + t`; the map must preserve orientation.
    pub fn map_affine(&self, m: &nalgebra::Matrix2<f64>, t: Point) -> Result<Self> {
        if m.determinant() <= 0.0 {
            return Err(Error::Precondition("affine map must preserve orientation".into()));
        }
        let verts: Vec<Point> = self.vertices.iter().map(|v| m * v + t).collect();
        convex_hull(&verts)
    }
}

/// Convex hull by Andrew's monotone chain; collinear and duplicate points are dropped.
pub fn convex_hull(points: &[Point]) -> Result<Polytope> {
    let pts: Vec<Point> = points.iter().copied().filter(|p| p.x.is_finite() && p.y.is_finite()).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(format!("{} points", pts.len())));
    }
    let diam = diameter(&pts);
    let tol = REL_TOL * diam * diam;
    let mut sorted = pts;
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    sorted.dedup_by(|a, b| (*a - *b).norm() <= REL_TOL * diam);
    if sorted.len() < 3 {
        return Err(Error::DegenerateInput("fewer than three distinct points".into()));
    }

    let mut lower: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in &sorted {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in sorted.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("points are collinear".into()));
    }
    // Near-collinear triples can survive when the chain tolerance meets the
    // polygon tolerance exactly; sweep them out.
    let mut verts = lower;
    loop {
        let n = verts.len();
        if n < 3 {
            return Err(Error::DegenerateInput("points are collinear".into()));
        }
        let bad = (0..n).find(|&i| {
            let a = verts[(i + n - 1) % n];
            let b = verts[i];
            let c = verts[(i + 1) % n];
            orient(a, b, c) <= tol || (b - a).norm() <= REL_TOL * diam
        });
        match bad {
            Some(i) => {
                verts.remove(i);
            }
            None => break,
        }
    }
    Polytope::new(verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn unit_square() -> Polytope {
        Polytope::new(vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap()
    }

    #[test]
    fn hull_drops_interior_point() {
        let hull = convex_hull(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.), p(0.5, 0.5)]).unwrap();
        assert_eq!(hull.len(), 4);
        assert!((hull.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_rejects_collinear() {
        let err = convex_hull(&[p(0., 0.), p(1., 1.), p(2., 2.)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn polytope_rejects_clockwise_and_duplicates() {
        assert!(Polytope::new(vec![p(0., 0.), p(0., 1.), p(1., 1.), p(1., 0.)]).is_err());
        assert!(Polytope::new(vec![p(0., 0.), p(1., 0.), p(1., 0.), p(0., 1.)]).is_err());
    }

    #[test]
    fn areas() {
        assert_eq!(unit_square().area(), 1.0);
        let tri = Polytope::new(vec![p(0., 0.), p(1., 0.), p(0., 1.)]).unwrap();
        assert_eq!(tri.area(), 0.5);
        let hex: Vec<Point> = (0..6).map(|k| {
            let t = k as f64 * PI / 3.0;
            p(t.cos(), t.sin())
        }).collect();
        let hex = Polytope::new(hex).unwrap();
        assert!((hex.area() - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn centroids() {
        let c = unit_square().centroid().unwrap();
        assert!((c - p(0.5, 0.5)).norm() < 1e-15);

        let tri = Polytope::new(vec![p(0., 0.), p(3., 0.), p(1., 2.)]).unwrap();
        let c = tri.centroid().unwrap();
        assert!((c - p(4. / 3., 2. / 3.)).norm() < 1e-14);

        // Half-disk: closed-form centroid height 4/(3 pi).
        let verts: Vec<Point> = (0..720)
            .map(|k| {
                let t = k as f64 * PI / 719.0;
                p(t.cos(), t.sin())
            })
            .collect();
        let hd = convex_hull(&verts).unwrap();
        let c = hd.centroid().unwrap();
        assert!(c.x.abs() < 1e-4);
        assert!((c.y - 4.0 / (3.0 * PI)).abs() < 1e-4);
    }

    #[test]
    fn centroid_of_sliver_is_zero_area() {
        // Valid but extremely thin triangle.
        let tri = Polytope { vertices: vec![p(0., 0.), p(1., 0.), p(0.5, 1e-14)] };
        assert!(matches!(tri.centroid(), Err(Error::ZeroArea(_))));
    }

    #[test]
    fn distances() {
        let sq = unit_square();
        assert_eq!(sq.distance(p(0.5, 0.5)), 0.0);
        assert!((sq.distance(p(2.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((sq.boundary_distance(p(0.5, 0.4)) - 0.4).abs() < 1e-15);
    }
}
