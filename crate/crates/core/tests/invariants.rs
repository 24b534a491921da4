use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use proptest::prelude::*;

use boundary_sections::barriers::{quadratic_barrier, verify_comparison, BarrierKind, BarrierSpec, Region};
use boundary_sections::geometry::{convex_hull, mvee, Point};
use boundary_sections::problem::make_standard_problem;
use boundary_sections::section::SlidingMap;
use boundary_sections::solver::solve;

fn cloud() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| Point::new(x, y)), 3..40)
}

fn angular(theta0: f64) -> BarrierSpec {
    BarrierSpec::new(
        BarrierKind::Angular2d { sigma: 0.1, c0: 5.0, m: 2.0, theta0 },
        Region::Sector { theta_min: theta0, theta_max: PI - theta0, r_max: 10.0 },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_contains_its_input(points in cloud()) {
        let Ok(hull) = convex_hull(&points) else { return Ok(()) };
        let tol = 1e-9 * hull.diameter();
        for p in &points {
            prop_assert!(hull.contains(*p, tol));
        }
        for v in hull.vertices() {
            prop_assert!(points.iter().any(|p| (p - v).norm() == 0.0));
        }
    }

    #[test]
    fn enclosing_ellipse_contains_points_and_follows_linear_maps(
        points in cloud(),
        a in 0.3f64..3.0, b in -1.0f64..1.0, c in 0.3f64..3.0,
    ) {
        let Ok(e) = mvee(&points, 1e-7) else { return Ok(()) };
        for p in &points {
            prop_assert!(e.gauge(*p) <= 1.0 + 1e-6);
        }
        let m = Matrix2::new(a, b, 0.0, c);
        let mapped: Vec<Point> = points.iter().map(|p| m * p).collect();
        let f = mvee(&mapped, 1e-7).unwrap();
        let ratio = f.volume() / (e.volume() * m.determinant().abs());
        prop_assert!((ratio - 1.0).abs() < 1e-5, "volume ratio {}", ratio);
    }

    #[test]
    fn angular_det_is_homogeneous_of_degree_minus_one(r in 0.05f64..2.0, t in 0.25f64..(PI - 0.25)) {
        prop_assume!((t - FRAC_PI_2).abs() > 1e-3);
        let b = angular(0.2);
        let p = Point::new(t.cos(), t.sin()) * r;
        let ratio = b.eval(p * 2.0).unwrap().det / b.eval(p).unwrap().det;
        prop_assert!((ratio - 0.5).abs() < 1e-10);
    }

    #[test]
    fn quadratic_det_is_constant(x in -1.0f64..1.0, y in 0.0f64..1.0, lambda in 0.5f64..4.0) {
        let b = BarrierSpec::new(
            BarrierKind::Quadratic { mu: 0.5, lambda_max: lambda, c_rho: Some(3.0) },
            Region::Box { lo: [-1.0, 0.0], hi: [1.0, 1.0] },
        )
        .unwrap();
        let det = b.eval(Point::new(x, y)).unwrap().det;
        prop_assert!((det - 4.0 * lambda).abs() <= 1e-12 * 4.0 * lambda);
    }

    #[test]
    fn lowering_shifts_value_and_keeps_det(amount in 0.0f64..2.0, x in 0.01f64..1.0, y in 0.01f64..1.0) {
        let b = angular(0.2);
        let p = Point::new(x, y);
        prop_assume!(b.region.contains(p) && (p.y.atan2(p.x) - FRAC_PI_2).abs() > 1e-3);
        let (e, l) = (b.eval(p).unwrap(), b.lowered(amount).eval(p).unwrap());
        prop_assert!((e.value - l.value - amount).abs() <= 1e-12 * (1.0 + e.value.abs()));
        prop_assert_eq!(e.det, l.det);
    }

    #[test]
    fn sliding_inverse_undoes_the_map(nu in -3.0f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let s = SlidingMap { nu };
        let p = Point::new(x, y);
        prop_assert!((s.inverse().apply(s.apply(p)) - p).norm() < 1e-12);
        prop_assert!((s.matrix().determinant() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn comparison_is_monotone_under_lowering() {
    let spec = make_standard_problem("radial").unwrap();
    let u = solve(&spec, 1.0 / 32.0, 2, 1e-10).unwrap();
    let b = quadratic_barrier(&u).unwrap();
    let mut last = f64::NEG_INFINITY;
    for amount in [0.0, 0.05, 0.2, 1.0] {
        let r = verify_comparison(&b.lowered(amount), &u).unwrap();
        assert!(r.pass);
        assert!(r.min_gap >= last - 1e-12);
        last = r.min_gap;
    }
}
