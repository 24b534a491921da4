//! Problem instances: domain, right-hand side and boundary data, with the
//! validators for the standing assumptions on each.

mod data;
mod domain;
mod file;

pub use data::{BoundaryData, BoundaryFn, Rhs};
pub use domain::{BoundaryPiece, Check, ConvexDomain, DomainReport, Shape};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Point};

/// `det D^2 u = f` on `domain` with `u = phi` on the boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "file::ProblemFile", into = "file::ProblemFile")]
pub struct ProblemSpec {
    pub name: String,
    pub domain: ConvexDomain,
    pub rhs: Rhs,
    pub lambda: f64,
    pub lambda_max: f64,
    pub boundary: BoundaryData,
}

impl ProblemSpec {
    /// Checks `0 < lambda <= f <= Lambda` on every partition cell.
    pub fn check_pinching(&self) -> Result<()> {
        self.rhs.check_shape()?;
        if !(self.lambda > 0.0 && self.lambda <= self.lambda_max) {
            return Err(Error::InvalidProblem(format!(
                "need 0 < lambda <= Lambda, got {} and {}",
                self.lambda, self.lambda_max
            )));
        }
        for v in self.rhs.cell_values() {
            if v < self.lambda || v > self.lambda_max {
                return Err(Error::InvalidProblem(format!(
                    "f = {v} outside [{}, {}]",
                    self.lambda, self.lambda_max
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// Largest `mu` admissible on the sampled boundary.
    pub tightest_mu: f64,
    pub samples: usize,
}

/// Checks `mu |x|^2 <= phi <= mu^{-1} |x|^2` on `∂Ω ∩ {x_2 <= rho}`.
///
/// Constant data is only meaningful after the tangent plane at the origin is
/// subtracted, which leaves `s x_2` on the boundary for an unknown slope `s`.
/// For it the report gives the best `mu` over all slopes,
/// `sqrt(min r / max r)` with `r = x_2 / |x|^2`.
pub fn validate_growth(data: &BoundaryData, domain: &ConvexDomain, samples: usize) -> Result<GrowthReport> {
    if samples < 100 {
        return Err(Error::Precondition(format!("need at least 100 samples, got {samples}")));
    }
    let tiny = 1e-9 * domain.diameter();
    let pts: Vec<Point> = domain
        .boundary_samples(samples)
        .into_iter()
        .filter(|p| p.y <= domain.rho() && p.norm() > tiny)
        .collect();
    if pts.is_empty() {
        return Err(Error::Precondition("no boundary samples below x_2 = rho".into()));
    }
    let phi0 = data.phi.eval(Point::zeros());
    let ratio = |p: &Point| match data.phi {
        BoundaryFn::Constant(_) => p.y / p.norm_squared(),
        _ => (data.phi.eval(*p) - phi0) / p.norm_squared(),
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_at, mut hi_at) = (pts[0], pts[0]);
    for p in &pts {
        let r = ratio(p);
        if r < lo {
            lo = r;
            lo_at = *p;
        }
        if r > hi {
            hi = r;
            hi_at = *p;
        }
    }
    let tightest = match data.phi {
        BoundaryFn::Constant(_) if lo > 0.0 => (lo / hi).sqrt(),
        BoundaryFn::Constant(_) => 0.0,
        _ => lo.min(1.0 / hi).min(1.0),
    };
    let mu = data.mu;
    if !(tightest > 0.0) || mu > tightest * (1.0 + 1e-12) {
        let at = if lo <= 0.0 || mu > lo { lo_at } else { hi_at };
        let r2 = at.norm_squared();
        return Err(Error::GrowthViolated {
            point: at,
            phi: data.phi.eval(at) - phi0,
            lower: mu * r2,
            upper: r2 / mu,
        });
    }
    Ok(GrowthReport { tightest_mu: tightest, samples: pts.len() })
}

/// Largest `mu` on a 0.01 lattice that the data admits.
fn admissible_mu(phi: &BoundaryFn, domain: &ConvexDomain) -> f64 {
    let probe = BoundaryData { phi: phi.clone(), mu: 1e-12 };
    let t = validate_growth(&probe, domain, 4096).map(|r| r.tightest_mu).unwrap_or(0.0);
    (t * 100.0).floor() / 100.0
}

fn half_disk() -> ConvexDomain {
    ConvexDomain::disk_cap(Point::zeros(), 1.0, 0.45)
}

/// Built-in test problems: `radial`, `sheared`, `constant-bdry` and
/// `random-polygon(SEED)`.
pub fn make_standard_problem(name: &str) -> Result<ProblemSpec> {
    let spec = match name {
        "radial" => {
            let domain = half_disk();
            let phi = BoundaryFn::quadratic(1.0, 0.0, 1.0);
            ProblemSpec {
                name: name.into(),
                rhs: Rhs::Constant(4.0),
                lambda: 4.0,
                lambda_max: 4.0,
                boundary: BoundaryData { mu: admissible_mu(&phi, &domain), phi },
                domain,
            }
        }
        "sheared" => {
            let domain = half_disk();
            // x1^2 + (x1 + x2)^2
            let phi = BoundaryFn::quadratic(2.0, 2.0, 1.0);
            ProblemSpec {
                name: name.into(),
                rhs: Rhs::Constant(4.0),
                lambda: 4.0,
                lambda_max: 4.0,
                boundary: BoundaryData { mu: admissible_mu(&phi, &domain), phi },
                domain,
            }
        }
        "constant-bdry" => {
            let domain = ConvexDomain::disk_cap(Point::new(0.0, 0.5), 0.5, 0.5);
            let phi = BoundaryFn::Constant(1.0);
            ProblemSpec {
                name: name.into(),
                rhs: Rhs::Constant(1.0),
                lambda: 1.0,
                lambda_max: 1.0,
                boundary: BoundaryData { mu: admissible_mu(&phi, &domain), phi },
                domain,
            }
        }
        _ => {
            let seed = name
                .strip_prefix("random-polygon(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| Error::UnknownName(name.into()))?;
            random_polygon(seed)?
        }
    };
    spec.check_pinching()?;
    Ok(spec)
}

/// Random convex polygon with a flat bottom edge through the origin, a
/// piecewise-constant `f` on a 3x3 partition and a random positive-definite
/// quadratic `phi`.
fn random_polygon(seed: u64) -> Result<ProblemSpec> {
    const RHO: f64 = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let a = rng.random_range(0.35..0.6);
        let b = rng.random_range(0.35..0.6);
        let mut pts = vec![Point::new(-a, 0.0), Point::new(b, 0.0)];
        let k = rng.random_range(4..8);
        let hub = Point::new(0.0, 0.1);
        for _ in 0..k {
            let t = rng.random_range(0.05..0.95) * std::f64::consts::PI;
            let r = rng.random_range(0.45..0.8);
            pts.push(hub + Point::new(t.cos(), t.sin()) * r);
        }
        let Ok(poly) = convex_hull(&pts) else { continue };
        // The origin must sit inside the bottom edge.
        let on_bottom = poly
            .edges()
            .any(|(p, q)| p.y == 0.0 && q.y == 0.0 && p.x.min(q.x) < -0.3 && p.x.max(q.x) > 0.3);
        if !on_bottom {
            continue;
        }
        let domain = ConvexDomain::polygon(poly, RHO);
        if !domain.validate().accepted {
            continue;
        }

        let (lo, hi) = domain.bounding_box();
        let mut breaks = |lo: f64, hi: f64| {
            let mut v = [rng.random_range(0.2..0.45), rng.random_range(0.55..0.8)]
                .map(|s| lo + (hi - lo) * s)
                .to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        let x_breaks = breaks(lo.x, hi.x);
        let y_breaks = breaks(lo.y, hi.y);
        let values: Vec<Vec<f64>> =
            (0..3).map(|_| (0..3).map(|_| rng.random_range(1.0..2.0)).collect()).collect();
        let flat: Vec<f64> = values.iter().flatten().copied().collect();
        let lambda = flat.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda_max = flat.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        // Near 0 the section is roughly {p11 x1^2 + f x2^2 / (4 p11) < h}; these
        // ranges keep its aspect ratio sqrt(f) / (2 p11) within [0.4, 2.5].
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let (l1, l2) = (rng.random_range(0.5..1.25), rng.random_range(0.5..1.25));
        let (c, s) = (angle.cos(), angle.sin());
        let q11 = l1 * c * c + l2 * s * s;
        let q22 = l1 * s * s + l2 * c * c;
        let q12 = (l1 - l2) * c * s;
        let phi = BoundaryFn::quadratic(q11, 2.0 * q12, q22);
        let mu = admissible_mu(&phi, &domain);
        if mu <= 0.0 {
            continue;
        }
        return Ok(ProblemSpec {
            name: format!("random-polygon({seed})"),
            domain,
            rhs: Rhs::Piecewise { x_breaks, y_breaks, values },
            lambda,
            lambda_max,
            boundary: BoundaryData { phi, mu },
        });
    }
    Err(Error::InvalidProblem(format!("no admissible random polygon for seed {seed}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_growth_on_half_disk() {
        let d = half_disk();
        let data = BoundaryData { phi: BoundaryFn::quadratic(1.0, 0.0, 1.0), mu: 1.0 };
        let r = validate_growth(&data, &d, 1000).unwrap();
        assert!((r.tightest_mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_part_growth() {
        // On {x_2 = 0}, 2 x_1^2 = 2 |x|^2; restrict to the flat edge by
        // shrinking rho below every arc sample height.
        let d = ConvexDomain::disk_cap(Point::zeros(), 1.0, 1e-3);
        let data = BoundaryData { phi: BoundaryFn::quadratic(2.0, 0.0, 0.0), mu: 0.5 };
        let r = validate_growth(&data, &d, 1000).unwrap();
        assert!((r.tightest_mu - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linear_data_violates_growth() {
        let d = half_disk();
        let data = BoundaryData { phi: BoundaryFn::Polynomial([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]), mu: 0.1 };
        match validate_growth(&data, &d, 1000) {
            Err(Error::GrowthViolated { point, .. }) => assert!(point.y.abs() < 1e-12 && point.x != 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_data_in_tangent_ball() {
        let spec = make_standard_problem("constant-bdry").unwrap();
        let r = validate_growth(&spec.boundary, &spec.domain, 1000).unwrap();
        // Ω is itself the tangent ball, so x_2 = |x|^2 on the whole boundary.
        assert!((r.tightest_mu - 1.0).abs() < 1e-9);
    }

    #[test]
    fn growth_needs_enough_samples() {
        let d = half_disk();
        let data = BoundaryData { phi: BoundaryFn::quadratic(1.0, 0.0, 1.0), mu: 1.0 };
        assert!(matches!(validate_growth(&data, &d, 50), Err(Error::Precondition(_))));
    }

    #[test]
    fn tightest_mu_monotone_in_samples() {
        let spec = make_standard_problem("sheared").unwrap();
        let mut prev = f64::INFINITY;
        for n in [128, 256, 512, 1024, 2048] {
            let r = validate_growth(&spec.boundary, &spec.domain, n).unwrap();
            assert!(r.tightest_mu <= prev + 1e-15);
            prev = r.tightest_mu;
        }
    }

    #[test]
    fn standard_problems_validate() {
        for name in ["radial", "sheared", "constant-bdry", "random-polygon(7)", "random-polygon(1)"] {
            let spec = make_standard_problem(name).unwrap();
            assert!(spec.domain.validate().accepted, "{name}");
            validate_growth(&spec.boundary, &spec.domain, 1000).unwrap();
            spec.check_pinching().unwrap();
        }
        assert!(matches!(make_standard_problem("bogus"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn sheared_mu_from_arc() {
        let spec = make_standard_problem("sheared").unwrap();
        // Arc samples below x_2 = 0.45 give phi/|x|^2 up to about 2.6.
        assert!(spec.boundary.mu > 0.3 && spec.boundary.mu < 0.4, "{}", spec.boundary.mu);
    }

    #[test]
    fn random_polygon_is_deterministic() {
        let a = make_standard_problem("random-polygon(7)").unwrap();
        let b = make_standard_problem("random-polygon(7)").unwrap();
        assert_eq!(a, b);
        let c = make_standard_problem("random-polygon(8)").unwrap();
        assert_ne!(a, c);
    }
}
