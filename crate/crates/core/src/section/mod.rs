//! Boundary sections `S_h = {u < h}` of a tangent-normalized solution and
//! the quantities measured on them.

mod metrics;

pub use metrics::{
    effective_mu, graph_growth, john_normalize, rescale_unit, sliding_map, GraphGrowth, SectionMetrics, SlidingMap,
    UnitRescaling, ALPHA_REF, MISALIGNED_ANGLE,
};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Point, Polytope};
use crate::problem::BoundaryPiece;
use crate::solver::{GridSolution, Target};

/// Sections containing fewer grid nodes are below resolution.
pub const MIN_SECTION_NODES: usize = 10;

/// Supporting plane `offset + slope x_2` removed by [`tangent_normalize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentPlane {
    pub offset: f64,
    pub slope: f64,
}

/// Subtracts the boundary value at 0 and the maximal supporting slope
/// `s x_2`, leaving `u >= 0` with `u(0) = 0` and no `ε x_2` minorant.
///
/// The slope is the smaller of two estimates: the infimum of `u / x_2` over
/// nodes with `x_2 >= 2h`, and a one-sided quadratic fit of `u(0, t)` at the
/// first three nodes above the origin. The infimum alone overshoots by
/// `O(h)` because the nearest admissible node sits at height `2h`.
pub fn tangent_normalize(u: &GridSolution) -> Result<(GridSolution, TangentPlane)> {
    let offset = u.boundary_value(Point::zeros());
    let h = u.grid.spacing();
    let mut slope = u
        .grid
        .nodes()
        .iter()
        .zip(&u.values)
        .filter(|(p, _)| p.y >= 2.0 * h - 1e-12 * h)
        .map(|(p, v)| (v - offset) / p.y)
        .fold(f64::INFINITY, f64::min);
    if let Some(fit) = axis_slope(u, offset) {
        slope = slope.min(fit);
    }
    if !slope.is_finite() {
        return Err(Error::Precondition("no grid nodes above the origin".into()));
    }
    let mut out = u.clone();
    out.subtract_affine(offset, 0.0, slope);
    let scale = out.max_abs().max(f64::MIN_POSITIVE);
    let worst = out.samples().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    if worst < -1e-6 * scale {
        return Err(Error::NegativeValues(worst));
    }
    for v in out.values.iter_mut().chain(out.boundary_values.iter_mut()) {
        *v = v.max(0.0);
    }
    Ok((out, TangentPlane { offset, slope }))
}

/// Least-squares `s` in `u(0, t) - u(0) ≈ s t + a t^2` over the nodes `(0, j h)`, `j = 1..3`.
fn axis_slope(u: &GridSolution, offset: f64) -> Option<f64> {
    let h = u.grid.spacing();
    let pts: Vec<(f64, f64)> = (1..=3)
        .filter_map(|j| u.grid.node_at(0, j).map(|k| (j as f64 * h, u.values[k] - offset)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, g) in pts {
        s11 += t * t;
        s12 += t * t * t;
        s22 += t * t * t * t;
        r1 += g * t;
        r2 += g * t * t;
    }
    let det = s11 * s22 - s12 * s12;
    Some((r1 * s22 - r2 * s12) / det)
}

/// Convexified sublevel set `{u < h}` with its boundary-graph part.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub h: f64,
    pub body: Polytope,
    /// Samples of `∂Ω` where the boundary data is below `h`.
    pub graph_part: Vec<Point>,
    pub centroid: Point,
    /// Grid nodes with `u < h`.
    pub nodes_inside: usize,
}

impl Section {
    /// Image under the linear map `m`, which must preserve orientation.
    pub fn map_linear(&self, m: &Matrix2<f64>) -> Result<Section> {
        Ok(Section {
            h: self.h,
            body: self.body.map_affine(m, Point::zeros())?,
            graph_part: self.graph_part.iter().map(|p| m * p).collect(),
            centroid: m * self.centroid,
            nodes_inside: self.nodes_inside,
        })
    }
}

/// Section of a tangent-normalized solution at level `h`; fails with
/// `EmptySection` below [`MIN_SECTION_NODES`] resolved nodes.
pub fn extract_section(u: &GridSolution, h: f64) -> Result<Section> {
    let s = extract_section_unchecked(u, h)?;
    if s.nodes_inside < MIN_SECTION_NODES {
        return Err(Error::EmptySection(s.nodes_inside));
    }
    Ok(s)
}

/// [`extract_section`] without the resolution check.
///
/// The body is the convex hull of: nodes with `u < h`; linear crossings of
/// `u = h` on lattice edges and on arms ending at `∂Ω`; arm endpoints on
/// `∂Ω` below `h`; and samples of `∂Ω` (spacing `h_g / 4`, plus bisected
/// crossings) where the boundary data is below `h`.
pub fn extract_section_unchecked(u: &GridSolution, h: f64) -> Result<Section> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("section level {h} must be positive")));
    }
    let grid = &u.grid;
    let below = |v: f64| v < h;
    let cross = |a: Point, va: f64, b: Point, vb: f64| a + (b - a) * ((h - va) / (vb - va));
    let mut pts = Vec::new();
    let mut nodes_inside = 0;

    for k in 0..grid.len() {
        let (p, v) = (grid.nodes()[k], u.values[k]);
        if below(v) {
            nodes_inside += 1;
            pts.push(p);
        }
        let [i, j] = grid.lattice(k);
        for (di, dj) in [(1, 0), (0, 1)] {
            if let Some(n) = grid.node_at(i + di, j + dj) {
                let w = u.values[n];
                if below(v) != below(w) {
                    pts.push(cross(p, v, grid.nodes()[n], w));
                }
            }
        }
        for d in 0..grid.directions().len() {
            for side in [0, 1] {
                let arm = grid.arm(k, d, side);
                if let Target::Boundary(b) = arm.target {
                    let (q, w) = (grid.boundary()[b], u.boundary_values[b]);
                    if below(w) {
                        pts.push(q);
                    } else if below(v) {
                        pts.push(cross(p, v, q, w));
                    }
                }
            }
        }
    }

    let mut graph_part = Vec::new();
    let step = grid.spacing() / 4.0;
    for piece in u.spec.domain.pieces() {
        let n = (piece.length() / step).ceil().max(1.0) as usize;
        let mut prev: Option<(f64, f64)> = None;
        for j in 0..=n {
            let s = j as f64 / n as f64;
            let val = u.boundary_value(piece.at(s));
            if below(val) {
                graph_part.push(piece.at(s));
            }
            if let Some((s0, v0)) = prev {
                if below(v0) != below(val) {
                    graph_part.push(bisect_level(u, piece, s0, s, h));
                }
            }
            prev = Some((s, val));
        }
    }
    let origin = Point::zeros();
    if below(u.boundary_value(origin)) {
        graph_part.push(origin);
    }
    pts.extend_from_slice(&graph_part);

    let body = convex_hull(&pts).map_err(|_| Error::EmptySection(nodes_inside))?;
    let centroid = body.centroid().map_err(|_| Error::EmptySection(nodes_inside))?;
    Ok(Section { h, body, graph_part, centroid, nodes_inside })
}

/// Point of `piece` between parameters `a` and `b` where the boundary data
/// crosses `h`, taken on the side below `h`.
fn bisect_level(u: &GridSolution, piece: &BoundaryPiece, mut a: f64, mut b: f64, h: f64) -> Point {
    let below_a = u.boundary_value(piece.at(a)) < h;
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if (u.boundary_value(piece.at(m)) < h) == below_a {
            a = m;
        } else {
            b = m;
        }
    }
    piece.at(if below_a { a } else { b })
}

/// `h^{-1/2} max x_2` over the section body.
pub fn b_value(s: &Section) -> f64 {
    s.body.vertices().iter().map(|v| v.y).fold(f64::NEG_INFINITY, f64::max) / s.h.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_standard_problem;
    use crate::solver::build_grid;
    use std::f64::consts::PI;

    fn exact(name: &str, spacing: f64, g: impl Fn(Point) -> f64) -> GridSolution {
        let spec = make_standard_problem(name).unwrap();
        let grid = build_grid(&spec.domain, spacing, 2).unwrap();
        GridSolution::from_function(&spec, grid, g)
    }

    #[test]
    fn normalization_of_exact_quadratics() {
        let u = exact("radial", 1.0 / 64.0, |p| p.norm_squared());
        let (v, plane) = tangent_normalize(&u).unwrap();
        assert!(plane.slope.abs() < 1e-12 && plane.offset == 0.0);
        assert!(v.max_error(|p| p.norm_squared()) < 1e-12);

        let sheared = |p: Point| p.x * p.x + (p.x + p.y).powi(2);
        let (_, plane) = tangent_normalize(&exact("sheared", 1.0 / 64.0, sheared)).unwrap();
        assert!(plane.slope.abs() < 1e-12);
    }

    #[test]
    fn normalization_removes_linear_term() {
        let mut u = exact("radial", 1.0 / 64.0, |p| p.norm_squared());
        u.subtract_affine(0.0, 0.0, -3.0);
        assert!((u.boundary_value(Point::new(0.5, 0.0)) - 0.25).abs() < 1e-15);
        let (v, plane) = tangent_normalize(&u).unwrap();
        assert!((plane.slope - 3.0).abs() < 1e-10);
        assert!(v.max_error(|p| p.norm_squared()) < 1e-10);
        assert!((v.boundary_value(Point::new(0.6, 0.8)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_data_normalizes_to_half_square() {
        let u = exact("constant-bdry", 1.0 / 128.0, |p| 0.5 * p.norm_squared() - 0.5 * p.y + 1.0);
        let (v, plane) = tangent_normalize(&u).unwrap();
        assert!((plane.offset - 1.0).abs() < 1e-12);
        assert!((plane.slope + 0.5).abs() < 1e-10);
        assert!(v.max_error(|p| 0.5 * p.norm_squared()) < 1e-10);
    }

    #[test]
    fn dip_below_tangent_is_reported() {
        // A dent in the first row of nodes, away from the axis.
        let h = 1.0 / 64.0;
        let u = exact("radial", h, |p| {
            let dent = if p.x > 0.3 && p.y > 0.0 && p.y < 1.5 * h { 0.2 } else { 0.0 };
            p.norm_squared() - dent
        });
        assert!(matches!(tangent_normalize(&u), Err(Error::NegativeValues(_))));
    }

    #[test]
    fn radial_section_is_half_disk() {
        let u = exact("radial", 1.0 / 256.0, |p| p.norm_squared());
        let s = extract_section(&u, 0.01).unwrap();
        let area = PI * 0.01 / 2.0;
        assert!((s.body.area() - area).abs() < 0.02 * area);
        assert!((b_value(&s) - 1.0).abs() < 0.02);
        assert!(s.graph_part.iter().all(|p| p.y.abs() < 1e-12 && p.x.abs() < 0.1));
    }

    #[test]
    fn sheared_section_area_and_height() {
        let u = exact("sheared", 1.0 / 256.0, |p| p.x * p.x + (p.x + p.y).powi(2));
        let s = extract_section(&u, 0.01).unwrap();
        let area = PI * 0.01 / 2.0;
        assert!((s.body.area() - area).abs() < 0.02 * area);
        assert!((b_value(&s) - 2f64.sqrt()).abs() < 0.02 * 2f64.sqrt());
    }

    #[test]
    fn level_above_max_gives_domain() {
        let u = exact("radial", 1.0 / 64.0, |p| p.norm_squared());
        let s = extract_section(&u, 2.0).unwrap();
        assert!((s.body.area() - PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn tiny_level_is_unresolved() {
        let u = exact("radial", 1.0 / 64.0, |p| p.norm_squared());
        assert!(matches!(extract_section(&u, 1e-4), Err(Error::EmptySection(_))));
        assert!(matches!(extract_section(&u, 0.0), Err(Error::Precondition(_))));
    }
}
