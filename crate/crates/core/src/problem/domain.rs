use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::{ClipRegion, Point, Polytope};

/// Geometry of the domain boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polygon(Polytope),
    /// `B_radius(center) ∩ {x_2 >= 0}`.
    DiskCap { center: Point, radius: f64 },
}

/// One inequality of the convex description `g(x) <= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Constraint {
    /// `normal · x <= offset`, `normal` unit outward.
    HalfPlane { normal: Point, offset: f64 },
    Disk { center: Point, radius: f64 },
}

impl Constraint {
    fn slack(&self, p: Point) -> f64 {
        match *self {
            Constraint::HalfPlane { normal, offset } => normal.dot(&p) - offset,
            Constraint::Disk { center, radius } => (p - center).norm() - radius,
        }
    }

    /// First `t > 0` where `p + t v` leaves the constraint, for `p` inside.
    fn exit(&self, p: Point, v: Point) -> Option<f64> {
        match *self {
            Constraint::HalfPlane { normal, offset } => {
                let nv = normal.dot(&v);
                (nv > 0.0).then(|| ((offset - normal.dot(&p)) / nv).max(0.0))
            }
            Constraint::Disk { center, radius } => {
                let d = p - center;
                let a = v.norm_squared();
                let b = d.dot(&v);
                let c = d.norm_squared() - radius * radius;
                let disc = (b * b - a * c).max(0.0);
                // Stable form of the positive root (c <= 0 inside).
                let t = if b >= 0.0 { -c / (b + disc.sqrt()) } else { (disc.sqrt() - b) / a };
                Some(t.max(0.0))
            }
        }
    }
}

/// A piece of the boundary curve, traversed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPiece {
    Segment { a: Point, b: Point },
    Arc { center: Point, radius: f64, start: f64, end: f64 },
}

impl BoundaryPiece {
    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { a, b } => (b - a).norm(),
            BoundaryPiece::Arc { radius, start, end, .. } => radius * (end - start),
        }
    }

    /// Point at fraction `s ∈ [0, 1]` of the piece.
    pub fn at(&self, s: f64) -> Point {
        match *self {
            BoundaryPiece::Segment { a, b } => a + (b - a) * s,
            BoundaryPiece::Arc { center, radius, start, end } => {
                let t = start + (end - start) * s;
                center + Point::new(t.cos(), t.sin()) * radius
            }
        }
    }
}

/// Convex planar domain touching `{x_2 = 0}` at the origin, with the ball
/// parameter `rho` of the interior/exterior ball sandwich.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexDomain {
    shape: Shape,
    rho: f64,
    constraints: Vec<Constraint>,
    pieces: Vec<BoundaryPiece>,
}

/// Pass/fail of one inclusion together with the worst violation found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub worst_violation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub origin_on_boundary: Check,
    pub interior_ball: Check,
    pub exterior_bound: Check,
    pub accepted: bool,
}

impl ConvexDomain {
    pub fn polygon(poly: Polytope, rho: f64) -> Self {
        let n = poly.len();
        let v = poly.vertices();
        let constraints = (0..n)
            .map(|i| {
                let e = v[(i + 1) % n] - v[i];
                let normal = Point::new(e.y, -e.x).normalize();
                Constraint::HalfPlane { normal, offset: normal.dot(&v[i]) }
            })
            .collect();
        let pieces = poly.edges().map(|(a, b)| BoundaryPiece::Segment { a, b }).collect();
        Self { shape: Shape::Polygon(poly), rho, constraints, pieces }
    }

    pub fn disk_cap(center: Point, radius: f64, rho: f64) -> Self {
        let constraints = vec![
            Constraint::Disk { center, radius },
            Constraint::HalfPlane { normal: Point::new(0.0, -1.0), offset: 0.0 },
        ];
        let pieces = if center.y >= radius {
            vec![BoundaryPiece::Arc { center, radius, start: -PI / 2.0, end: 1.5 * PI }]
        } else {
            let half = (radius * radius - center.y * center.y).sqrt();
            let (xl, xr) = (center.x - half, center.x + half);
            let start = (-center.y).atan2(xr - center.x);
            vec![
                BoundaryPiece::Segment { a: Point::new(xl, 0.0), b: Point::new(xr, 0.0) },
                BoundaryPiece::Arc { center, radius, start, end: PI - start },
            ]
        };
        Self { shape: Shape::DiskCap { center, radius }, rho, constraints, pieces }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn perimeter(&self) -> f64 {
        self.pieces.iter().map(BoundaryPiece::length).sum()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.shape {
            Shape::Polygon(p) => p.bounding_box(),
            Shape::DiskCap { center, radius } => (
                Point::new(center.x - radius, (center.y - radius).max(0.0)),
                Point::new(center.x + radius, center.y + radius),
            ),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Polygon(p) => p.diameter(),
            Shape::DiskCap { .. } => {
                let (lo, hi) = self.bounding_box();
                (hi - lo).norm().min(2.0 * self.max_radius())
            }
        }
    }

    fn max_radius(&self) -> f64 {
        match self.shape {
            Shape::DiskCap { radius, .. } => radius,
            Shape::Polygon(_) => f64::INFINITY,
        }
    }

    /// Largest constraint value; `<= 0` inside the closed domain.
    pub fn slack(&self, p: Point) -> f64 {
        self.constraints.iter().map(|c| c.slack(p)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.slack(p) <= tol
    }

    /// Distance to the boundary for interior points (negative outside).
    pub fn interior_distance(&self, p: Point) -> f64 {
        -self.slack(p)
    }

    /// Parameter `t > 0` where the ray `p + t v` exits the domain.
    pub fn exit(&self, p: Point, v: Point) -> f64 {
        self.constraints
            .iter()
            .filter_map(|c| c.exit(p, v))
            .fold(f64::INFINITY, f64::min)
    }

    /// `count` points equispaced in arclength, starting at the first piece.
    ///
    /// The sample set for `k·count` contains the one for `count`.
    pub fn boundary_samples(&self, count: usize) -> Vec<Point> {
        let total = self.perimeter();
        let mut out = Vec::with_capacity(count);
        let mut piece = 0;
        let mut offset = 0.0;
        for k in 0..count {
            let s = total * k as f64 / count as f64;
            while piece + 1 < self.pieces.len() && s >= offset + self.pieces[piece].length() {
                offset += self.pieces[piece].length();
                piece += 1;
            }
            let len = self.pieces[piece].length();
            out.push(self.pieces[piece].at(((s - offset) / len).clamp(0.0, 1.0)));
        }
        out
    }

    /// Samples on every piece, at most `step` apart, piece endpoints included.
    pub fn boundary_samples_step(&self, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            let k = (piece.length() / step).ceil().max(1.0) as usize;
            out.extend((0..k).map(|j| piece.at(j as f64 / k as f64)));
        }
        out
    }

    /// Validates `B_rho(rho e_2) ⊂ Ω ⊂ {x_2 >= 0} ∩ B_{1/rho}` with the origin on `∂Ω`.
    pub fn validate(&self) -> DomainReport {
        let diam = self.diameter();
        let tol = 1e-9 * diam.max(1.0);
        let rho = self.rho;

        let origin = self.slack(Point::zeros()).abs();
        let origin_on_boundary = Check { pass: origin <= tol, worst_violation: origin };

        let ball_center = Point::new(0.0, rho);
        let worst_ball = (0..720)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 720.0;
                self.slack(ball_center + Point::new(t.cos(), t.sin()) * rho)
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        let interior_ball = Check { pass: rho > 0.0 && worst_ball <= tol, worst_violation: worst_ball };

        let mut outside: Vec<Point> = self.boundary_samples_step(diam / 2048.0);
        if let Shape::Polygon(p) = &self.shape {
            outside.extend_from_slice(p.vertices());
        }
        let worst_ext = outside
            .iter()
            .map(|q| (-q.y).max(q.norm() - 1.0 / rho))
            .fold(0.0, f64::max);
        let exterior_bound = Check { pass: worst_ext <= tol, worst_violation: worst_ext };

        DomainReport {
            origin_on_boundary,
            interior_ball,
            exterior_bound,
            accepted: origin_on_boundary.pass && interior_ball.pass && exterior_bound.pass,
        }
    }
}

impl ClipRegion for ConvexDomain {
    fn contains(&self, p: Point, tol: f64) -> bool {
        ConvexDomain::contains(self, p, tol)
    }

    fn boundary_distance(&self, p: Point) -> f64 {
        self.interior_distance(p).abs()
    }

    fn boundary_samples_in(&self, lo: Point, hi: Point, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            let k = (piece.length() / step).ceil().max(1.0) as usize;
            out.extend(
                (0..=k)
                    .map(|j| piece.at(j as f64 / k as f64))
                    .filter(|q| q.x >= lo.x && q.x <= hi.x && q.y >= lo.y && q.y <= hi.y),
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_disk(rho: f64) -> ConvexDomain {
        ConvexDomain::disk_cap(Point::zeros(), 1.0, rho)
    }

    #[test]
    fn half_disk_passes() {
        let r = half_disk(0.45).validate();
        assert!(r.accepted, "{r:?}");
    }

    #[test]
    fn unit_square_fails_interior_ball() {
        let sq = Polytope::new(vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
        ])
        .unwrap();
        for rho in [0.05, 0.2, 0.45] {
            let r = ConvexDomain::polygon(sq.clone(), rho).validate();
            assert!(!r.interior_ball.pass);
            assert!(r.interior_ball.worst_violation > 0.0);
            assert!(!r.accepted);
        }
    }

    #[test]
    fn tangent_disk_is_boundary_case() {
        let d = ConvexDomain::disk_cap(Point::new(0.0, 0.5), 0.5, 0.5);
        let r = d.validate();
        assert!(r.accepted, "{r:?}");
        assert_eq!(d.pieces().len(), 1);
    }

    #[test]
    fn ray_exit_half_disk() {
        let d = half_disk(0.45);
        let p = Point::new(0.2, 0.3);
        let t = d.exit(p, Point::new(0.0, -1.0));
        assert!((t - 0.3).abs() < 1e-15);
        let t = d.exit(p, Point::new(1.0, 0.0));
        assert!(((p.x + t).powi(2) + p.y * p.y - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nested_boundary_samples() {
        let d = half_disk(0.45);
        let a = d.boundary_samples(100);
        let b = d.boundary_samples(200);
        for (k, q) in a.iter().enumerate() {
            assert!((q - b[2 * k]).norm() < 1e-12);
        }
        assert!((d.perimeter() - (PI + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn interior_distance() {
        let d = half_disk(0.45);
        assert!((d.interior_distance(Point::new(0.0, 0.1)) - 0.1).abs() < 1e-15);
        assert!((d.interior_distance(Point::new(0.0, 0.95)) - 0.05).abs() < 1e-15);
        assert!(d.interior_distance(Point::new(0.0, -0.1)) < 0.0);
    }
}
