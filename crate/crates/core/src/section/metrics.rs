use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::Section;
use crate::error::{Error, Result};
use crate::geometry::{dilation_factor, mvee, Ellipsoid, Point};
use crate::problem::ConvexDomain;
use crate::solver::GridSolution;

/// Exponent `n / (n + 1)` of the lower bound `d_n >= c h^alpha`, for `n = 2`.
pub const ALPHA_REF: f64 = 2.0 / 3.0;

/// Angle (radians) between the fitted `d_2` axis and `e_2` above which a
/// section is flagged as misaligned.
pub const MISALIGNED_ANGLE: f64 = 0.2;

/// Shear `x -> (x_1 - nu x_2, x_2)` fixing `{x_2 = 0}` pointwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlidingMap {
    pub nu: f64,
}

impl SlidingMap {
    pub fn apply(&self, p: Point) -> Point {
        Point::new(p.x - self.nu * p.y, p.y)
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(1.0, -self.nu, 0.0, 1.0)
    }

    pub fn inverse(&self) -> SlidingMap {
        SlidingMap { nu: -self.nu }
    }
}

/// Sliding that moves the section centroid onto the `x_2` axis.
pub fn sliding_map(s: &Section) -> Result<SlidingMap> {
    let c = s.centroid;
    if !(c.y > 1e-12 * s.body.diameter()) {
        return Err(Error::DegenerateCentroid(c.y));
    }
    Ok(SlidingMap { nu: c.x / c.y })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionMetrics {
    pub h: f64,
    pub area: f64,
    pub b: f64,
    pub nu: f64,
    /// Semi-axes of the centered enclosing ellipse of the symmetrized slid
    /// body; `d[1]` belongs to the axis closer to `e_2`.
    pub d: [f64; 2],
    /// Angle between the `d[1]` axis and `e_2`.
    pub axis_angle: f64,
    pub misaligned: bool,
    /// Largest `k` with `k E_h ∩ Ω ⊂ S_h`, for `E_h = {|A x|^2 <= h}`.
    pub k_in: f64,
    /// Smallest `k` with `S_h ⊂ k E_h`.
    pub k_out: f64,
    pub alpha_ref: f64,
    /// `|x_1|` of the slid centroid.
    pub centroid_offset: f64,
    /// Volume of the fitted ellipse before any rescaling.
    pub fitted_volume: f64,
}

/// Slides the section, fits the centered enclosing ellipse of the body
/// symmetrized about its centroid and measures the body against
/// `E_h = A^{-1}(h^{1/2} B_1)` clipped to `domain`. Boundary points within
/// `tol` of `∂Ω` count as shared boundary.
pub fn john_normalize(s: &Section, m: &SlidingMap, domain: &ConvexDomain, tol: f64) -> Result<SectionMetrics> {
    let a = m.matrix();
    let c = m.apply(s.centroid);
    let sym: Vec<Point> = s
        .body
        .vertices()
        .iter()
        .flat_map(|v| {
            let w = m.apply(*v);
            [w, 2.0 * c - w]
        })
        .collect();
    let fit = mvee(&sym, 1e-6)?;
    let axes = fit.semi_axes();
    let (i2, i1) = if axes[0].1.y.abs() >= axes[1].1.y.abs() { (0, 1) } else { (1, 0) };
    let axis_angle = axes[i2].1.y.abs().min(1.0).acos();

    let e_h = Ellipsoid::new(Point::zeros(), a.transpose() * a / s.h)?;
    let (k_in, k_out) = dilation_factor(&s.body, &e_h, domain, tol)?;
    Ok(SectionMetrics {
        h: s.h,
        area: s.body.area(),
        b: super::b_value(s),
        nu: m.nu,
        d: [axes[i1].0, axes[i2].0],
        axis_angle,
        misaligned: axis_angle > MISALIGNED_ANGLE,
        k_in,
        k_out,
        alpha_ref: ALPHA_REF,
        centroid_offset: c.x.abs(),
        fitted_volume: fit.volume(),
    })
}

/// Samples of `v(y) = u(h^{1/2} A^{-1} y) / h` with the sandwich constants
/// `c B_1 ∩ Ω_v ⊂ {v < 1} ⊂ C B_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitRescaling {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    pub c: f64,
    pub big_c: f64,
}

/// Rescales a tangent-normalized solution so that the section at level `h`
/// becomes a unit-size body. The constants are affine invariants, so they
/// equal the `k_in`, `k_out` of `metrics`.
pub fn rescale_unit(u: &GridSolution, metrics: &SectionMetrics, m: &SlidingMap) -> UnitRescaling {
    let r = metrics.h.sqrt();
    let (points, values) = u.samples().map(|(p, v)| (m.apply(p) / r, v / metrics.h)).unzip();
    UnitRescaling { points, values, c: metrics.k_in, big_c: metrics.k_out }
}

/// Extremes of `ũ / y_1^2` over the graph part of a slid section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphGrowth {
    pub mu: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
    /// Graph samples above `x_2 = rho`, where the boundary data carries no
    /// growth assumption; they are not checked.
    pub excluded: usize,
    pub pass: bool,
}

/// Checks `mu/2 y_1^2 <= ũ <= 2/mu y_1^2` at every graph sample in
/// `{x_2 <= rho}`, with `y = A x` and `ũ` the normalized boundary data.
/// Samples with `y_1^2 < 1e-12 h` only need `ũ <= 1e-12 h`.
pub fn graph_growth(u: &GridSolution, s: &Section, m: &SlidingMap, mu: f64) -> GraphGrowth {
    let tiny = 1e-12 * s.h;
    let rho = u.spec.domain.rho();
    let (mut lo, mut hi, mut count, mut excluded, mut pass) = (f64::INFINITY, 0.0f64, 0, 0, true);
    for &x in &s.graph_part {
        if x.y > rho {
            excluded += 1;
            continue;
        }
        let y1 = m.apply(x).x;
        let v = u.boundary_value(x);
        let q = y1 * y1;
        if q < tiny {
            pass &= v <= tiny;
            continue;
        }
        let r = v / q;
        lo = lo.min(r);
        hi = hi.max(r);
        count += 1;
        pass &= r >= 0.5 * mu && r <= 2.0 / mu;
    }
    if count == 0 {
        lo = 0.0;
    }
    GraphGrowth { mu, min_ratio: lo, max_ratio: hi, samples: count, excluded, pass }
}

/// Growth constant of the normalized boundary data on `∂Ω ∩ {x_2 <= rho}`:
/// the largest `mu <= 1` with `mu |x|^2 <= ũ <= |x|^2 / mu` there.
pub fn effective_mu(u: &GridSolution, samples: usize) -> f64 {
    let d = &u.spec.domain;
    let tiny = 1e-9 * d.diameter();
    d.boundary_samples(samples)
        .into_iter()
        .filter(|p| p.y <= d.rho() && p.norm() > tiny)
        .map(|p| {
            let r = u.boundary_value(p) / p.norm_squared();
            if r > 0.0 { r.min(1.0 / r) } else { 0.0 }
        })
        .fold(1.0, f64::min)
}

#[cfg(test)]
mod tests {
    use super::super::{b_value, extract_section};
    use super::*;
    use crate::geometry::{convex_hull, mvee};
    use crate::problem::make_standard_problem;
    use crate::solver::build_grid;

    fn exact(name: &str, spacing: f64, g: impl Fn(Point) -> f64) -> GridSolution {
        let spec = make_standard_problem(name).unwrap();
        let grid = build_grid(&spec.domain, spacing, 2).unwrap();
        GridSolution::from_function(&spec, grid, g)
    }

    fn sheared(p: Point) -> f64 {
        p.x * p.x + (p.x + p.y).powi(2)
    }

    /// Semi-axes of the enclosing ellipse of the unit half-disk symmetrized
    /// about its centroid, from a dense polygon.
    fn half_disk_axes() -> (f64, f64) {
        let n = 4000;
        let pts: Vec<Point> = (0..=n)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let hd = convex_hull(&pts).unwrap();
        let c = hd.centroid().unwrap();
        let sym: Vec<Point> = hd.vertices().iter().flat_map(|v| [*v, 2.0 * c - v]).collect();
        let e = mvee(&sym, 1e-7).unwrap();
        let [(a, da), (b, _)] = e.semi_axes();
        if da.x.abs() > da.y.abs() { (a, b) } else { (b, a) }
    }

    #[test]
    fn radial_sliding_and_axes() {
        let u = exact("radial", 1.0 / 256.0, |p| p.norm_squared());
        let s = extract_section(&u, 0.01).unwrap();
        let m = sliding_map(&s).unwrap();
        assert!(m.nu.abs() < 1e-3);
        let met = john_normalize(&s, &m, &u.spec.domain, u.grid.spacing()).unwrap();
        let (k1, k2) = half_disk_axes();
        assert!((met.d[0] / (0.1 * k1) - 1.0).abs() < 0.03, "{:?} {k1}", met.d);
        assert!((met.d[1] / (0.1 * k2) - 1.0).abs() < 0.03, "{:?} {k2}", met.d);
        assert!(met.k_out / met.k_in <= 2.2);
        assert!(met.centroid_offset <= 1e-10 * 0.1);
        assert!(!met.misaligned);
    }

    #[test]
    fn sheared_slides_to_symmetric_half_ellipse() {
        let u = exact("sheared", 1.0 / 256.0, sheared);
        let s = extract_section(&u, 0.01).unwrap();
        let m = sliding_map(&s).unwrap();
        assert!((m.nu + 0.5).abs() < 0.01);
        let met = john_normalize(&s, &m, &u.spec.domain, u.grid.spacing()).unwrap();
        // Slid body is the half of {2 y1^2 + y2^2 / 2 < h} above y2 = 0:
        // the half-disk scaled by sqrt(h/2) and sqrt(2h).
        let (k1, k2) = half_disk_axes();
        let ratio = met.d[1] / met.d[0];
        assert!((ratio / (2.0 * k2 / k1) - 1.0).abs() < 0.03, "{ratio}");
        // Gauges of |y|^2 / h on the half-ellipse run from 1/2 to 2.
        assert!((met.k_out - 2f64.sqrt()).abs() < 0.03);
        assert!((met.k_in - 0.5f64.sqrt()).abs() < 0.03);
    }

    #[test]
    fn sliding_moves_centroid_to_axis() {
        let u = exact("sheared", 1.0 / 128.0, sheared);
        let s = extract_section(&u, 0.02).unwrap();
        let m = sliding_map(&s).unwrap();
        let slid = s.map_linear(&m.matrix()).unwrap();
        assert!(slid.centroid.x.abs() <= 1e-10 * slid.centroid.y);
        assert!((b_value(&slid) - b_value(&s)).abs() < 1e-10);
    }

    #[test]
    fn horizontal_shear_shifts_nu() {
        let u = exact("radial", 1.0 / 128.0, |p| p.norm_squared());
        let s = extract_section(&u, 0.02).unwrap();
        let nu0 = sliding_map(&s).unwrap().nu;
        let delta = 0.37;
        let moved = s.map_linear(&Matrix2::new(1.0, delta, 0.0, 1.0)).unwrap();
        let nu1 = sliding_map(&moved).unwrap().nu;
        assert!((nu1 - nu0 - delta).abs() < 1e-10);
    }

    #[test]
    fn flat_centroid_is_degenerate() {
        let u = exact("radial", 1.0 / 128.0, |p| p.norm_squared());
        let mut s = extract_section(&u, 0.02).unwrap();
        s.centroid = Point::new(0.01, 1e-14);
        assert!(matches!(sliding_map(&s), Err(Error::DegenerateCentroid(_))));
    }

    #[test]
    fn unit_rescaling_is_self_similar() {
        let u = exact("sheared", 1.0 / 256.0, sheared);
        for h in [0.04, 0.01] {
            let s = extract_section(&u, h).unwrap();
            let m = sliding_map(&s).unwrap();
            let met = john_normalize(&s, &m, &u.spec.domain, u.grid.spacing()).unwrap();
            let v = rescale_unit(&u, &met, &m);
            for (y, val) in v.points.iter().zip(&v.values) {
                let target = 2.0 * y.x * y.x + 0.5 * y.y * y.y;
                assert!((val - target).abs() <= 0.02 * target.max(1.0));
            }
            assert!((v.c - met.k_in).abs() == 0.0 && v.big_c == met.k_out);
        }

        let u = exact("radial", 1.0 / 256.0, |p| p.norm_squared());
        let s = extract_section(&u, 0.01).unwrap();
        let m = sliding_map(&s).unwrap();
        let met = john_normalize(&s, &m, &u.spec.domain, u.grid.spacing()).unwrap();
        let v = rescale_unit(&u, &met, &m);
        assert!((v.c - 1.0).abs() < 0.03 && (v.big_c - 1.0).abs() < 0.03);
    }

    #[test]
    fn graph_growth_on_flat_boundary() {
        let u = exact("sheared", 1.0 / 128.0, sheared);
        let s = extract_section(&u, 0.02).unwrap();
        let m = sliding_map(&s).unwrap();
        // On {x_2 = 0}, ũ = 2 x_1^2.
        let g = graph_growth(&u, &s, &m, 0.5);
        assert!(g.pass && g.samples > 10);
        assert!((g.min_ratio - 2.0).abs() < 1e-9 && (g.max_ratio - 2.0).abs() < 1e-9);
        assert!(!graph_growth(&u.scaled(3.0), &s, &m, 0.5).pass);
    }

    #[test]
    fn effective_mu_of_normalized_data() {
        let u = exact("radial", 1.0 / 64.0, |p| p.norm_squared());
        assert!((effective_mu(&u, 2000) - 1.0).abs() < 1e-12);
    }
}
