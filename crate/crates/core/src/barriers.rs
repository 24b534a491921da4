//! Explicit lower barriers with closed-form Hessian determinants, and
//! numerical checks of the subsolution property and of comparison against a
//! discrete solution.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polytope};
use crate::solver::GridSolution;

/// Angular distance from the kink line `θ = π/2` inside which samples are rejected.
pub const KINK_MARGIN: f64 = 1e-6;

/// Barrier formulas. Angular kinds use polar coordinates `(r, θ)`; the
/// `n`-dimensional one is evaluated in the meridian plane `(|x'|, x_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "kebab-case")]
pub enum BarrierKind {
    /// `mu x_1^2 + (Lambda / mu) x_2^2 - c_rho x_2`. A missing `c_rho` is
    /// filled from a solution by [`BarrierSpec::with_solution_constants`].
    Quadratic {
        mu: f64,
        #[serde(rename = "Lambda")]
        lambda_max: f64,
        #[serde(default)]
        c_rho: Option<f64>,
    },
    /// `eps x_2 + (h/2) (x_1 / (c1 h^{alpha/2}))^2 + Lambda c1^2 h (x_2 / h^alpha)^2`.
    SectionW {
        eps: f64,
        h: f64,
        c1: f64,
        #[serde(rename = "Lambda")]
        lambda_max: f64,
        alpha: f64,
    },
    /// `eps x_2 + c h ((x_1/d_1)^2 + (x_2/d_2)^2)`.
    SectionDiag { eps: f64, c: f64, h: f64, d: [f64; 2] },
    /// `delta (|x_1| + x_1^2/2) + (Lambda/delta) x_2^2 - n_slope x_2`.
    Cone {
        delta: f64,
        #[serde(rename = "Lambda")]
        lambda_max: f64,
        n_slope: f64,
    },
    /// `r f(θ) + x_2^2 / (2 M^2)` with `f = sigma e^{c0 |π/2 - θ|}`.
    Angular2d { sigma: f64, c0: f64, m: f64, theta0: f64 },
    /// `r f(θ) + x_n^2 / (2 M^2)` with `f = amp e^{c0 (π/2 - θ)}`, `θ` the
    /// angle to `{x_n = 0}`.
    AngularNd { amp: f64, c0: f64, m: f64, n: usize, theta0: f64 },
}

/// Where a barrier is evaluated and sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    Box { lo: [f64; 2], hi: [f64; 2] },
    /// `theta_min <= θ <= theta_max`, `r <= r_max`.
    Sector { theta_min: f64, theta_max: f64, r_max: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Box { lo, hi } => {
                let tol = 1e-12 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
                p.x >= lo[0] - tol && p.x <= hi[0] + tol && p.y >= lo[1] - tol && p.y <= hi[1] + tol
            }
            Region::Sector { theta_min, theta_max, r_max } => {
                let r = p.norm();
                if r == 0.0 {
                    return true;
                }
                let t = p.y.atan2(p.x);
                r <= r_max * (1.0 + 1e-12) && t >= theta_min - 1e-12 && t <= theta_max + 1e-12
            }
            Region::Polygon { .. } => match self.polygon() {
                Ok(poly) => poly.contains(p, 1e-12 * poly.diameter()),
                Err(_) => false,
            },
        }
    }

    fn polygon(&self) -> Result<Polytope> {
        match self {
            Region::Polygon { vertices } => Polytope::new(vertices.iter().map(|v| Point::new(v[0], v[1])).collect()),
            _ => Err(Error::Precondition("not a polygon region".into())),
        }
    }
}

/// A barrier `scale * w - shift` on `region`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    #[serde(flatten)]
    pub kind: BarrierKind,
    pub region: Region,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub shift: f64,
}

fn one() -> f64 {
    1.0
}

/// Value, gradient and Hessian determinant at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: Point,
    pub det: f64,
}

impl BarrierSpec {
    pub fn new(kind: BarrierKind, region: Region) -> Result<Self> {
        let b = BarrierSpec { kind, region, scale: 1.0, shift: 0.0 };
        b.validate()?;
        Ok(b)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BarrierSpec { scale: self.scale * factor, ..self.clone() }
    }

    pub fn lowered(&self, amount: f64) -> Self {
        BarrierSpec { shift: self.shift + amount, ..self.clone() }
    }

    /// Checks that every scale parameter is positive and angles are in range.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Precondition(format!("barrier parameter {what} out of range")));
        let pos = |v: f64| v > 0.0 && v.is_finite();
        match &self.kind {
            BarrierKind::Quadratic { mu, lambda_max, c_rho } => {
                if !pos(*mu) || !pos(*lambda_max) || c_rho.is_some_and(|c| !(c >= 0.0)) {
                    return bad("mu, Lambda or c_rho");
                }
            }
            BarrierKind::SectionW { eps, h, c1, lambda_max, alpha } => {
                if !(*eps >= 0.0) || ![*h, *c1, *lambda_max, *alpha].into_iter().all(pos) {
                    return bad("eps, h, c1, Lambda or alpha");
                }
            }
            BarrierKind::SectionDiag { eps, c, h, d } => {
                if !(*eps >= 0.0) || ![*c, *h, d[0], d[1]].into_iter().all(pos) {
                    return bad("eps, c, h or d");
                }
            }
            BarrierKind::Cone { delta, lambda_max, n_slope } => {
                if ![*delta, *lambda_max, *n_slope].into_iter().all(pos) {
                    return bad("delta, Lambda or n_slope");
                }
            }
            BarrierKind::Angular2d { sigma: a, c0, m, theta0 } | BarrierKind::AngularNd { amp: a, c0, m, theta0, .. } => {
                if ![*a, *c0, *m].into_iter().all(pos) {
                    return bad("amplitude, c0 or M");
                }
                if !(*theta0 > 0.0 && *theta0 < FRAC_PI_2) {
                    return bad("theta0");
                }
            }
        }
        if let BarrierKind::AngularNd { n, .. } = self.kind {
            if n < 2 {
                return bad("n");
            }
        }
        if !pos(self.scale) || !self.shift.is_finite() {
            return bad("scale or shift");
        }
        if let Region::Polygon { .. } = self.region {
            self.region.polygon()?;
        }
        Ok(())
    }

    /// Spatial dimension the determinant refers to.
    pub fn dim(&self) -> usize {
        match self.kind {
            BarrierKind::AngularNd { n, .. } => n,
            _ => 2,
        }
    }

    /// Coefficient of a positive `x_2` term, if the barrier has one.
    pub fn epsilon(&self) -> Option<f64> {
        match self.kind {
            BarrierKind::SectionW { eps, .. } | BarrierKind::SectionDiag { eps, .. } if eps > 0.0 => Some(self.scale * eps),
            _ => None,
        }
    }

    /// Fills a missing quadratic `c_rho` with [`quadratic_c_rho`] for `u`.
    pub fn with_solution_constants(&self, u: &GridSolution) -> BarrierSpec {
        let mut out = self.clone();
        if let BarrierKind::Quadratic { mu, lambda_max, c_rho: c @ None } = &mut out.kind {
            *c = Some(quadratic_c_rho(u, *mu, *lambda_max));
        }
        out
    }

    /// Closed-form value, gradient and determinant.
    pub fn eval(&self, x: Point) -> Result<BarrierEval> {
        if !self.region.contains(x) {
            return Err(Error::OutsideRegion(x));
        }
        let raw = self.raw_eval(x)?;
        Ok(BarrierEval {
            value: self.scale * raw.value - self.shift,
            gradient: self.scale * raw.gradient,
            det: self.scale.powi(self.dim() as i32) * raw.det,
        })
    }

    /// Value anywhere in the closed region, kink line and apex included.
    pub fn value(&self, x: Point) -> Result<f64> {
        if !self.region.contains(x) {
            return Err(Error::OutsideRegion(x));
        }
        Ok(self.scale * self.raw_value(x)? - self.shift)
    }

    fn raw_value(&self, x: Point) -> Result<f64> {
        Ok(match self.kind {
            BarrierKind::Quadratic { mu, lambda_max, c_rho } => {
                mu * x.x * x.x + lambda_max / mu * x.y * x.y - c_rho.ok_or_else(unresolved)? * x.y
            }
            BarrierKind::SectionW { eps, h, c1, lambda_max, alpha } => {
                eps * x.y + 0.5 * h * (x.x / (c1 * h.powf(alpha / 2.0))).powi(2) + lambda_max * c1 * c1 * h * (x.y / h.powf(alpha)).powi(2)
            }
            BarrierKind::SectionDiag { eps, c, h, d } => eps * x.y + c * h * ((x.x / d[0]).powi(2) + (x.y / d[1]).powi(2)),
            BarrierKind::Cone { delta, lambda_max, n_slope } => {
                delta * (x.x.abs() + 0.5 * x.x * x.x) + lambda_max / delta * x.y * x.y - n_slope * x.y
            }
            BarrierKind::Angular2d { m, .. } | BarrierKind::AngularNd { m, .. } => {
                let r = x.norm();
                let f = if r > 0.0 { self.profile(x.y.atan2(x.x))[0] } else { 0.0 };
                r * f + x.y * x.y / (2.0 * m * m)
            }
        })
    }

    /// `[f, f', f'']` of the angular profile.
    fn profile(&self, theta: f64) -> [f64; 3] {
        match self.kind {
            BarrierKind::Angular2d { sigma, c0, .. } => {
                let f = sigma * (c0 * (FRAC_PI_2 - theta).abs()).exp();
                let s = if theta < FRAC_PI_2 { -1.0 } else { 1.0 };
                [f, s * c0 * f, c0 * c0 * f]
            }
            BarrierKind::AngularNd { amp, c0, .. } => {
                let f = amp * (c0 * (FRAC_PI_2 - theta)).exp();
                [f, -c0 * f, c0 * c0 * f]
            }
            _ => unreachable!("profile of a non-angular barrier"),
        }
    }

    fn raw_eval(&self, x: Point) -> Result<BarrierEval> {
        let value = self.raw_value(x)?;
        let (gradient, det) = match self.kind {
            BarrierKind::Quadratic { mu, lambda_max, c_rho } => {
                let c = c_rho.ok_or_else(unresolved)?;
                (Point::new(2.0 * mu * x.x, 2.0 * lambda_max / mu * x.y - c), 4.0 * lambda_max)
            }
            BarrierKind::SectionW { eps, h, c1, lambda_max, alpha } => {
                let a = h.powf(1.0 - alpha) / (c1 * c1);
                let b = 2.0 * lambda_max * c1 * c1 * h.powf(1.0 - 2.0 * alpha);
                (Point::new(a * x.x, eps + b * x.y), a * b)
            }
            BarrierKind::SectionDiag { eps, c, h, d } => {
                let a = 2.0 * c * h / (d[0] * d[0]);
                let b = 2.0 * c * h / (d[1] * d[1]);
                (Point::new(a * x.x, eps + b * x.y), a * b)
            }
            BarrierKind::Cone { delta, lambda_max, n_slope } => {
                if x.x == 0.0 {
                    return Err(Error::KinkPoint(x));
                }
                let g = Point::new(delta * (x.x.signum() + x.x), 2.0 * lambda_max / delta * x.y - n_slope);
                (g, 2.0 * lambda_max)
            }
            BarrierKind::Angular2d { m, .. } | BarrierKind::AngularNd { m, .. } => {
                let r = x.norm();
                if r == 0.0 {
                    return Err(Error::OutsideRegion(x));
                }
                if x.x == 0.0 {
                    return Err(Error::KinkPoint(x));
                }
                let theta = x.y.atan2(x.x);
                let [f, fp, fpp] = self.profile(theta);
                let (c, s) = (theta.cos(), theta.sin());
                let g = Point::new(f * c - fp * s, f * s + fp * c + x.y / (m * m));
                let mut det = (fpp + f) / r * s * s / (m * m);
                if let BarrierKind::AngularNd { n, .. } = self.kind {
                    det *= ((f * c - fp * s) / (r * c)).powi(n as i32 - 2);
                }
                (g, det)
            }
        };
        Ok(BarrierEval { value, gradient, det })
    }

    /// Value at a point of `R^n` for the meridian kinds; the planar value otherwise.
    fn value_nd(&self, x: &DVector<f64>) -> f64 {
        let n = x.len();
        let s = x.rows(0, n - 1).norm();
        self.scale * self.raw_value(Point::new(s, x[n - 1])).unwrap_or(f64::NAN) - self.shift
    }

    /// Determinant of the central finite-difference Hessian with step `k`,
    /// taken in `R^n` at `(x_1, 0, ..., 0, x_2)` for the meridian kinds.
    pub fn fd_det(&self, x: Point, k: f64) -> f64 {
        let n = self.dim();
        let mut base = DVector::zeros(n);
        base[0] = x.x;
        base[n - 1] = x.y;
        let at = |i: usize, di: f64, j: usize, dj: f64| {
            let mut y = base.clone();
            y[i] += di;
            y[j] += dj;
            self.value_nd(&y)
        };
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n {
            hess[(i, i)] = (at(i, k, i, 0.0) - 2.0 * self.value_nd(&base) + at(i, -k, i, 0.0)) / (k * k);
            for j in 0..i {
                let v = (at(i, k, j, k) - at(i, k, j, -k) - at(i, -k, j, k) + at(i, -k, j, -k)) / (4.0 * k * k);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        hess.determinant()
    }

    /// Draws a point of the sampling set: the region, restricted for angular
    /// kinds to `{w >= x_2^2 / M^2}` and kept off the kink line.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        for _ in 0..10_000 {
            let p = match &self.region {
                Region::Box { lo, hi } => Point::new(rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])),
                Region::Polygon { .. } => {
                    let poly = self.region.polygon()?;
                    let (lo, hi) = poly.bounding_box();
                    let p = Point::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
                    if !poly.contains(p, 0.0) {
                        continue;
                    }
                    p
                }
                Region::Sector { theta_min, theta_max, r_max } => {
                    let t = rng.random_range(*theta_min..=*theta_max);
                    let reach = match self.kind {
                        BarrierKind::Angular2d { m, .. } | BarrierKind::AngularNd { m, .. } => {
                            let s = t.sin();
                            r_max.min(2.0 * m * m * self.profile(t)[0] / (s * s))
                        }
                        _ => *r_max,
                    };
                    let r = reach * rng.random_range(0.0f64..=1.0).sqrt();
                    if r <= 1e-9 * reach {
                        continue;
                    }
                    Point::new(r * t.cos(), r * t.sin())
                }
            };
            let kink = match self.kind {
                BarrierKind::Cone { .. } => p.x.abs() <= KINK_MARGIN * p.norm(),
                BarrierKind::Angular2d { .. } | BarrierKind::AngularNd { .. } => (p.y.atan2(p.x) - FRAC_PI_2).abs() <= KINK_MARGIN,
                _ => false,
            };
            if !kink && self.region.contains(p) {
                return Ok(p);
            }
        }
        Err(Error::Precondition("barrier sampling set is empty".into()))
    }
}

fn unresolved() -> Error {
    Error::Precondition("quadratic barrier needs c_rho".into())
}

/// Sampling plan for [`verify_subsolution`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampler {
    pub count: usize,
    pub seed: u64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { count: 1000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionReport {
    pub pass: bool,
    pub lambda_max: f64,
    pub samples: usize,
    pub min_det: f64,
    pub witness: [f64; 2],
    /// Largest relative gap between the closed-form and finite-difference
    /// determinants over the cross-check points.
    pub fd_max_rel_err: f64,
    pub fd_points: usize,
    pub fd_pass: bool,
}

/// Samples `det D^2 w` and compares its minimum with `lambda_max`; ten of the
/// samples are cross-checked against finite differences with step `1e-4 r`.
pub fn verify_subsolution(b: &BarrierSpec, lambda_max: f64, sampler: Sampler) -> Result<SubsolutionReport> {
    if sampler.count < 1000 {
        return Err(Error::Precondition(format!("need at least 1000 samples, got {}", sampler.count)));
    }
    b.validate()?;
    let (mut min_det, mut witness) = (f64::INFINITY, Point::zeros());
    let mut fd_max: f64 = 0.0;
    let mut fd_points = 0;
    for (i, p) in sample_points(b, sampler)?.into_iter().enumerate() {
        let e = b.eval(p)?;
        if e.det < min_det {
            min_det = e.det;
            witness = p;
        }
        if fd_points < 10 && i % (sampler.count / 10) == 0 && fd_safe(b, p) {
            let k = 1e-4 * p.norm();
            fd_max = fd_max.max((b.fd_det(p, k) - e.det).abs() / e.det.abs());
            fd_points += 1;
        }
    }
    let fd_pass = fd_max <= 1e-3;
    Ok(SubsolutionReport {
        pass: min_det > lambda_max && fd_pass,
        lambda_max,
        samples: sampler.count,
        min_det,
        witness: [witness.x, witness.y],
        fd_max_rel_err: fd_max,
        fd_points,
        fd_pass,
    })
}

/// Points of the sampling set of [`verify_subsolution`]: uniform in area over
/// the region, restricted for angular kinds to `{w >= x_2^2 / M^2}`, and
/// kept [`KINK_MARGIN`] away from the kink line.
pub fn sample_points(b: &BarrierSpec, sampler: Sampler) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    (0..sampler.count).map(|_| b.sample(&mut rng)).collect()
}

/// Whether the finite-difference stencil around `p` stays in the smooth part
/// of the barrier and inside its region.
fn fd_safe(b: &BarrierSpec, p: Point) -> bool {
    let k = 1e-4 * p.norm();
    if k == 0.0 {
        return false;
    }
    let smooth = match b.kind {
        BarrierKind::Cone { .. } => p.x.abs() > 4.0 * k,
        BarrierKind::Angular2d { .. } | BarrierKind::AngularNd { .. } => p.x.abs() > 4.0 * k,
        _ => true,
    };
    smooth && [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)].iter().all(|(a, c)| b.region.contains(p + k * Point::new(*a, *c)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub pass: bool,
    /// `min (u - w)` over interior nodes of the region.
    pub min_gap: f64,
    pub witness: [f64; 2],
    pub tolerance: f64,
    pub interior_checked: usize,
    pub boundary_checked: usize,
}

/// Checks `w <= u` on the grid nodes of `b`'s region.
///
/// Boundary dominance is checked first on the boundary points of `u` in the
/// region and on the region's rim nodes, those with an axis neighbor outside
/// the region. The remaining nodes must satisfy `u - w >= -1e-6 max|u|`.
pub fn verify_comparison(b: &BarrierSpec, u: &GridSolution) -> Result<ComparisonReport> {
    if b.dim() != 2 {
        return Err(Error::Precondition("comparison needs a planar barrier".into()));
    }
    b.validate()?;
    let tol = 1e-6 * u.max_abs();
    let g = &u.grid;
    let mut boundary_checked = 0;
    let mut dominate = |p: Point, uval: f64| -> Result<()> {
        let excess = b.value(p)? - uval;
        boundary_checked += 1;
        if excess > tol {
            return Err(Error::BoundaryDominanceFails { point: p, excess });
        }
        Ok(())
    };
    for (&p, &v) in g.boundary().iter().zip(&u.boundary_values) {
        if b.region.contains(p) {
            dominate(p, v)?;
        }
    }
    let mut interior = Vec::new();
    for (k, (&p, &v)) in g.nodes().iter().zip(&u.values).enumerate() {
        if !b.region.contains(p) {
            continue;
        }
        let rim = (0..2).any(|dir| (0..2).any(|side| !b.region.contains(g.arm_end(g.arm(k, dir, side)))));
        if rim {
            dominate(p, v)?;
        } else {
            interior.push((p, v));
        }
    }
    let (mut min_gap, mut witness) = (f64::INFINITY, Point::zeros());
    for &(p, v) in &interior {
        let gap = v - b.value(p)?;
        if gap < min_gap {
            min_gap = gap;
            witness = p;
        }
    }
    Ok(ComparisonReport {
        pass: min_gap >= -tol,
        min_gap,
        witness: [witness.x, witness.y],
        tolerance: tol,
        interior_checked: interior.len(),
        boundary_checked,
    })
}

/// `inf u / x_2` over nodes with `x_2 >= 2h`. A positive value is an `ε x_2`
/// minorant, which a tangent-normalized solution cannot have.
pub fn tangent_contradiction_probe(u: &GridSolution) -> f64 {
    let h = u.grid.spacing();
    let base = u.boundary_value(Point::zeros());
    u.grid
        .nodes()
        .iter()
        .zip(&u.values)
        .filter(|(p, _)| p.y >= 2.0 * h * (1.0 - 1e-12))
        .map(|(p, v)| (v - base) / p.y)
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `c_rho` for which the quadratic barrier lies below the boundary
/// data of `u` on `∂Ω ∩ {x_2 <= rho}` and below 0 on `Ω ∩ {x_2 = rho}`,
/// enlarged by 1%.
pub fn quadratic_c_rho(u: &GridSolution, mu: f64, lambda_max: f64) -> f64 {
    let d = &u.spec.domain;
    let rho = d.rho();
    let samples: Vec<Point> = d.boundary_samples(4000).into_iter().filter(|p| p.y <= rho).collect();
    let half_width = samples.iter().map(|p| p.x.abs()).fold(0.0, f64::max);
    let mut c = (mu * half_width * half_width + lambda_max / mu * rho * rho) / rho;
    for p in samples.iter().filter(|p| p.y > 1e-9 * d.diameter()) {
        c = c.max((mu * p.x * p.x + lambda_max / mu * p.y * p.y - u.boundary_value(*p)) / p.y);
    }
    1.01 * c
}

/// Quadratic barrier of `u` on `Ω ∩ {x_2 <= rho}` with the problem's `mu`
/// and `Lambda`.
pub fn quadratic_barrier(u: &GridSolution) -> Result<BarrierSpec> {
    let (mu, lambda_max) = (u.spec.boundary.mu, u.spec.lambda_max);
    let (lo, hi) = u.spec.domain.bounding_box();
    let region = Region::Box { lo: [lo.x, 0.0], hi: [hi.x, u.spec.domain.rho().min(hi.y)] };
    let c_rho = Some(quadratic_c_rho(u, mu, lambda_max));
    BarrierSpec::new(BarrierKind::Quadratic { mu, lambda_max, c_rho }, region)
}

/// Smallest `c0` with `(c0^2 + 1) sin^4(theta0) / (2 M^4) >= Lambda`; any
/// larger value makes the angular barriers subsolutions.
pub fn angular_c0_threshold(theta0: f64, m: f64, lambda_max: f64) -> f64 {
    let s2 = theta0.sin().powi(2);
    (2.0 * lambda_max * m.powi(4) / (s2 * s2) - 1.0).max(0.0).sqrt()
}

/// Smallest `N` with `(Lambda/delta) x_2^2 - N x_2 <= 0` on `B_{1/mu}^+`.
pub fn cone_slope(delta: f64, lambda_max: f64, mu: f64) -> f64 {
    lambda_max / (delta * mu)
}

/// Product `d_1 d_2` below which the diagonal section barrier has
/// determinant above `Lambda`: `(2 c h)^{n/2} / Lambda^{1/2}` for `n = 2`.
pub fn section_diag_threshold(c: f64, h: f64, lambda_max: f64) -> f64 {
    2.0 * c * h / lambda_max.sqrt()
}

/// Catalog file: a JSON list of barriers.
pub fn load_catalog(text: &str) -> Result<Vec<BarrierSpec>> {
    let list: Vec<BarrierSpec> = serde_json::from_str(text)?;
    for b in &list {
        b.validate()?;
    }
    Ok(list)
}
