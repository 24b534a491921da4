use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::{bounding_box, diameter, Point, Polytope};
use crate::error::{Error, Result};

/// `{x : (x - c)^T M (x - c) <= 1}` with `M` symmetric positive definite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    center: Point,
    shape: Matrix2<f64>,
}

impl Ellipsoid {
    pub fn new(center: Point, shape: Matrix2<f64>) -> Result<Self> {
        let scale = shape.abs().max();
        if (shape[(0, 1)] - shape[(1, 0)]).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Precondition("ellipsoid shape is not symmetric".into()));
        }
        let sym = (shape + shape.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Precondition("ellipsoid shape is not positive definite".into()));
        }
        Ok(Self { center, shape: sym })
    }

    /// Disk of radius `r` about `c`.
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(center, Matrix2::identity() / (radius * radius))
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn shape(&self) -> &Matrix2<f64> {
        &self.shape
    }

    pub fn volume(&self) -> f64 {
        PI / self.shape.determinant().sqrt()
    }

    /// Gauge of `p - center`: `p` lies in the ellipsoid iff this is at most one.
    pub fn gauge(&self, p: Point) -> f64 {
        let d = p - self.center;
        d.dot(&(self.shape * d)).max(0.0).sqrt()
    }

    pub fn contains(&self, p: Point, slack: f64) -> bool {
        let d = p - self.center;
        d.dot(&(self.shape * d)) <= 1.0 + slack
    }

    /// Semi-axis lengths and unit directions, longest axis first.
    pub fn semi_axes(&self) -> [(f64, Point); 2] {
        let eig = SymmetricEigen::new(self.shape);
        let mut axes = [0usize, 1].map(|i| {
            let v = eig.eigenvectors.column(i);
            (1.0 / eig.eigenvalues[i].sqrt(), Point::new(v[0], v[1]))
        });
        if axes[0].0 < axes[1].0 {
            axes.swap(0, 1);
        }
        axes
    }

    /// Dilation by `t` about the center.
    pub fn dilate(&self, t: f64) -> Self {
        Self { center: self.center, shape: self.shape / (t * t) }
    }

    /// Same center and axes, rescaled to the requested volume.
    pub fn with_volume(&self, volume: f64) -> Self {
        self.dilate((volume / self.volume()).sqrt())
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        let inv = self.shape.try_inverse().expect("positive definite");
        let half = Point::new(inv[(0, 0)].sqrt(), inv[(1, 1)].sqrt());
        (self.center - half, self.center + half)
    }
}

/// Minimum-volume enclosing ellipse with the default iteration cap.
pub fn mvee(points: &[Point], eps: f64) -> Result<Ellipsoid> {
    mvee_with_cap(points, eps, 100_000)
}

/// Khachiyan barycentric ascent with Todd-Yildirim away steps.
///
/// The returned ellipse contains every point (the farthest one sits on its
/// boundary) and its volume is within a factor `(1 + eps)` of minimal.
pub fn mvee_with_cap(points: &[Point], eps: f64, max_iter: usize) -> Result<Ellipsoid> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::Precondition(format!("mvee eps {eps} outside (0, 0.1]")));
    }
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!("{} points", points.len())));
    }
    // Work in centered, unit-diameter coordinates.
    let n = points.len();
    let mean = points.iter().sum::<Point>() / n as f64;
    let scale = diameter(points);
    if !(scale > 0.0) {
        return Err(Error::DegenerateInput("coincident points".into()));
    }
    let xs: Vec<Point> = points.iter().map(|p| (p - mean) / scale).collect();
    let cov = xs.iter().fold(Matrix2::zeros(), |acc, x| acc + x * x.transpose()) / n as f64;
    if cov.determinant() <= 1e-20 {
        return Err(Error::DegenerateInput("points are affinely dependent".into()));
    }

    let d = 2.0;
    let qs: Vec<Vector3<f64>> = xs.iter().map(|x| Vector3::new(x.x, x.y, 1.0)).collect();
    let mut u = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..max_iter {
        let x = qs
            .iter()
            .zip(&u)
            .fold(Matrix3::zeros(), |acc, (q, &w)| acc + q * q.transpose() * w);
        let xinv = x
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("singular moment matrix".into()))?;
        let mut j = 0;
        let mut mj = f64::NEG_INFINITY;
        let mut k = usize::MAX;
        let mut mk = f64::INFINITY;
        for (i, q) in qs.iter().enumerate() {
            let m = q.dot(&(xinv * q));
            if m > mj {
                mj = m;
                j = i;
            }
            if u[i] > 0.0 && m < mk {
                mk = m;
                k = i;
            }
        }
        let up = mj / (d + 1.0) - 1.0;
        let down = 1.0 - mk / (d + 1.0);
        if up <= eps && down <= eps {
            converged = true;
            break;
        }
        if up > down {
            let tau = (mj - d - 1.0) / ((d + 1.0) * (mj - 1.0));
            u.iter_mut().for_each(|w| *w *= 1.0 - tau);
            u[j] += tau;
        } else {
            let uk = u[k];
            let tau = ((d + 1.0 - mk) / ((d + 1.0) * (mk - 1.0))).min(uk / (1.0 - uk));
            u.iter_mut().for_each(|w| *w *= 1.0 + tau);
            u[k] = ((1.0 + tau) * uk - tau).max(0.0);
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: max_iter, residual: f64::NAN });
    }

    let c = xs.iter().zip(&u).fold(Point::zeros(), |acc, (x, &w)| acc + x * w);
    let s = xs
        .iter()
        .zip(&u)
        .fold(Matrix2::zeros(), |acc, (x, &w)| acc + (x - c) * (x - c).transpose() * w);
    let a = s
        .try_inverse()
        .ok_or_else(|| Error::DegenerateInput("singular scatter matrix".into()))?
        / d;
    let reach = xs
        .iter()
        .map(|x| (x - c).dot(&(a * (x - c))))
        .fold(0.0, f64::max);
    let shape = a / (reach * scale * scale);
    Ellipsoid::new(mean + c * scale, (shape + shape.transpose()) * 0.5)
}

/// Closed convex region used to clip dilated ellipsoids.
pub trait ClipRegion {
    fn contains(&self, p: Point, tol: f64) -> bool;
    /// Distance to the region's boundary (for points inside).
    fn boundary_distance(&self, p: Point) -> f64;
    /// Boundary points inside the box `[lo, hi]`, spaced at most `step` apart.
    fn boundary_samples_in(&self, lo: Point, hi: Point, step: f64) -> Vec<Point>;
}

/// `{x_2 >= 0}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct UpperHalfPlane;

impl ClipRegion for UpperHalfPlane {
    fn contains(&self, p: Point, tol: f64) -> bool {
        p.y >= -tol
    }

    fn boundary_distance(&self, p: Point) -> f64 {
        p.y.abs()
    }

    fn boundary_samples_in(&self, lo: Point, hi: Point, step: f64) -> Vec<Point> {
        if lo.y > 0.0 || hi.y < 0.0 {
            return Vec::new();
        }
        let k = ((hi.x - lo.x) / step).ceil().max(1.0) as usize;
        (0..=k)
            .map(|j| Point::new(lo.x + (hi.x - lo.x) * j as f64 / k as f64, 0.0))
            .collect()
    }
}

/// Dilation constants of `inner` against `outer` (dilations about the
/// ellipse center).
///
/// `k_out` is the least `t` with `inner ⊂ t·outer`. `k_in` is the largest `t`
/// with `t·outer ∩ clip ⊂ inner`, found as the smallest gauge over the part of
/// `clip \ inner` visible on sampled boundaries. Points within `tol` of the
/// clip boundary (resp. of `inner`) are treated as shared boundary.
pub fn dilation_factor(
    inner: &Polytope,
    outer: &Ellipsoid,
    clip: &dyn ClipRegion,
    tol: f64,
) -> Result<(f64, f64)> {
    let k_out = inner
        .vertices()
        .iter()
        .map(|&v| outer.gauge(v))
        .fold(0.0, f64::max);
    let step = 1e-3 * inner.diameter();

    let mut k_in = f64::INFINITY;
    for p in inner.boundary_samples(step) {
        if clip.contains(p, tol) && clip.boundary_distance(p) > tol {
            k_in = k_in.min(outer.gauge(p));
        }
    }
    let (lo, hi) = outer.dilate(2.0 * k_out.max(1.0)).bounding_box();
    let (ilo, ihi) = bounding_box(inner.vertices());
    let (lo, hi) = (lo.inf(&ilo), hi.sup(&ihi));
    let samples = clip.boundary_samples_in(lo, hi, step);
    if samples.is_empty() && !clip.contains(outer.center(), tol) {
        return Err(Error::EmptyIntersection);
    }
    for p in samples {
        if inner.distance(p) > tol {
            k_in = k_in.min(outer.gauge(p));
        }
    }
    Ok((k_in, k_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn circle_poly(n: usize, start: f64, end: f64) -> Vec<Point> {
        (0..n)
            .map(|k| {
                let t = start + (end - start) * k as f64 / (n - 1) as f64;
                p(t.cos(), t.sin())
            })
            .collect()
    }

    #[test]
    fn square_corners_give_circumscribed_circle() {
        let pts = [p(1., 1.), p(-1., 1.), p(-1., -1.), p(1., -1.)];
        let e = mvee(&pts, 1e-6).unwrap();
        assert!(e.center().norm() < 1e-9);
        let [(a, _), (b, _)] = e.semi_axes();
        let r = 2f64.sqrt();
        assert!((a - r).abs() < 1e-6 * r && (b - r).abs() < 1e-6 * r);
        // Dual certificate: uniform weights on the corners satisfy the
        // optimality condition sum w x x^T = M^{-1} / d.
        let scatter = pts.iter().fold(Matrix2::zeros(), |acc, x| acc + x * x.transpose()) / 4.0;
        let target = e.shape().try_inverse().unwrap() / 2.0;
        assert!((scatter - target).abs().max() < 1e-5);
    }

    #[test]
    fn sampled_ellipse_is_its_own_mvee() {
        let pts: Vec<Point> = (0..64)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 64.0;
                p(2.0 * t.cos(), t.sin())
            })
            .collect();
        let e = mvee(&pts, 1e-6).unwrap();
        let [(a, da), (b, _)] = e.semi_axes();
        assert!((a - 2.0).abs() < 0.02 && (b - 1.0).abs() < 0.01);
        assert!(da.x.abs() > 0.999);
    }

    #[test]
    fn triangle_mvee_contains_vertices() {
        let pts = [p(0., 0.), p(3., 0.), p(0.5, 2.)];
        let e = mvee(&pts, 1e-6).unwrap();
        for q in pts {
            assert!(e.contains(q, 1e-6));
        }
        // The Steiner circumellipse is centered at the centroid.
        assert!((e.center() - p(3.5 / 3.0, 2.0 / 3.0)).norm() < 1e-4);
    }

    #[test]
    fn mvee_rejects_collinear_and_bad_eps() {
        let pts = [p(0., 0.), p(1., 1.), p(2., 2.), p(3., 3.)];
        assert!(matches!(mvee(&pts, 1e-6), Err(Error::DegenerateInput(_))));
        assert!(matches!(mvee(&[p(0., 0.), p(1., 0.), p(0., 1.)], 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn mvee_iteration_cap() {
        let pts: Vec<Point> = (0..50).map(|k| p((k as f64).cos() * 3.0, (k as f64 * 1.7).sin())).collect();
        assert!(matches!(mvee_with_cap(&pts, 1e-9, 2), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn dilation_square_in_circle() {
        let sq = Polytope::new(vec![p(-1., -1.), p(1., -1.), p(1., 1.), p(-1., 1.)]).unwrap();
        let e = Ellipsoid::ball(Point::zeros(), 1.0).unwrap();
        let (k_in, k_out) = dilation_factor(&sq, &e, &UpperHalfPlane, 1e-9).unwrap();
        assert!((k_out - 2f64.sqrt()).abs() < 1e-12);
        assert!(k_in <= 1.0 + 1e-12);
    }

    #[test]
    fn dilation_half_disk() {
        let hd = convex_hull(&circle_poly(720, 0.0, PI)).unwrap();
        let e = Ellipsoid::ball(Point::zeros(), 1.0).unwrap();
        let (k_in, k_out) = dilation_factor(&hd, &e, &UpperHalfPlane, 1e-9).unwrap();
        assert!((k_in - 1.0).abs() < 1e-3, "{k_in}");
        assert!((k_out - 1.0).abs() < 1e-3, "{k_out}");
    }

    #[test]
    fn dilation_inscribed_polygon() {
        let verts: Vec<Point> = (0..64)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 64.0;
                p(t.cos(), t.sin())
            })
            .collect();
        let poly = Polytope::new(verts).unwrap();
        let e = Ellipsoid::ball(Point::zeros(), 1.0).unwrap();
        let (k_in, k_out) = dilation_factor(&poly, &e, &UpperHalfPlane, 1e-9).unwrap();
        assert!(k_out <= 1.0 + 1e-12);
        assert!(k_in >= (PI / 64.0).cos() - 1e-12);
        assert!(k_in <= k_out);
    }

    #[test]
    fn ellipse_volume_and_rescale() {
        let e = Ellipsoid::new(p(1., 2.), Matrix2::new(0.25, 0.0, 0.0, 1.0)).unwrap();
        assert!((e.volume() - 2.0 * PI).abs() < 1e-12);
        let f = e.with_volume(PI);
        assert!((f.volume() - PI).abs() < 1e-12);
        assert!(Ellipsoid::new(Point::zeros(), Matrix2::new(1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(Ellipsoid::new(Point::zeros(), Matrix2::new(1.0, 0.5, 0.0, 1.0)).is_err());
    }
}
