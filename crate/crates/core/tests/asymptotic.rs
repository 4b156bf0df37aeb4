use polarconv::asymptotic::{asymptotic_center, chebyshev_radius, eval_i, SequenceOracle, SolverConfig, TailWindow};
use polarconv::spaces::{Point, SpaceDescriptor};
use proptest::prelude::*;

/// min over a square grid of centers of the max distance to `pts`, and the
/// worst-case error of restricting centers to that grid.
fn grid_oracle(space: &SpaceDescriptor, pts: &[Vec<f64>], step: f64) -> (f64, f64) {
    let n = (2.0 / step).round() as i64;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let c = Point::vector([-1.0 + i as f64 * step, -1.0 + j as f64 * step]);
            let r = pts.iter().fold(0.0f64, |m, p| m.max(space.distance(&c, &Point::Vector(p.clone())).unwrap()));
            best = best.min(r);
        }
    }
    // half a cell diagonal, measured in the worst of the norms used here
    let err = space.norm().unwrap().value(&[step / 2.0, step / 2.0]);
    (best, err)
}

fn cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-0.9..0.9f64, 2), 2..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chebyshev_center_matches_grid_search(pts in cloud()) {
        let spaces = [
            SpaceDescriptor::euclidean(2),
            SpaceDescriptor::sup(2),
            SpaceDescriptor::l1(2),
            SpaceDescriptor::lp(2, 3.0).unwrap(),
        ];
        for s in spaces {
            let points: Vec<Point> = pts.iter().cloned().map(Point::Vector).collect();
            let sol = chebyshev_radius(&s, &points).unwrap();
            let (grid, err) = grid_oracle(&s, &pts, 0.01);
            prop_assert!(sol.gap >= 0.0);
            prop_assert!(sol.radius <= grid + 1e-3, "{:?}: solver {} grid {}", s.kind, sol.radius, grid);
            prop_assert!(sol.radius - sol.gap <= grid + 1e-9, "{:?}: lower bound {} above grid {}", s.kind, sol.radius - sol.gap, grid);
            prop_assert!(sol.radius >= grid - err - 1e-9);
            let reached = points.iter().fold(0.0f64, |m, p| m.max(s.distance(&sol.center, p).unwrap()));
            prop_assert!((reached - sol.radius).abs() <= 1e-9 * (1.0 + reached));
        }
    }

    #[test]
    fn radius_is_between_half_diameter_and_diameter(pts in cloud()) {
        for s in [SpaceDescriptor::euclidean(2), SpaceDescriptor::sup(2), SpaceDescriptor::lp(2, 1.5).unwrap()] {
            let points: Vec<Point> = pts.iter().cloned().map(Point::Vector).collect();
            let mut diam = 0.0f64;
            for a in &points {
                for b in &points {
                    diam = diam.max(s.distance(a, b).unwrap());
                }
            }
            let r = chebyshev_radius(&s, &points).unwrap().radius;
            prop_assert!(r >= diam / 2.0 - 1e-9 && r <= diam + 1e-9, "{:?}: r {} diam {}", s.kind, r, diam);
        }
    }

    #[test]
    fn eval_i_is_the_tail_maximum(pts in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 8..40), y in prop::collection::vec(-1.0..1.0f64, 2)) {
        let s = SpaceDescriptor::euclidean(2);
        let o = SequenceOracle::from_points(s.clone(), pts.iter().cloned().map(Point::Vector).collect(), true).unwrap();
        let w = TailWindow::default();
        let yp = Point::Vector(y);
        let direct = w.tail(o.horizon()).map(|k| s.distance(o.point(k), &yp).unwrap()).fold(0.0, f64::max);
        prop_assert_eq!(eval_i(&o, &yp, &w).unwrap().value, direct);
    }
}

#[test]
fn euclidean_two_point_center_is_the_midpoint() {
    let s = SpaceDescriptor::euclidean(3);
    let sol = chebyshev_radius(&s, &[Point::vector([1.0, 2.0, 3.0]), Point::vector([3.0, 2.0, -1.0])]).unwrap();
    let c = sol.center.as_vector().unwrap();
    assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] - 2.0).abs() < 1e-9 && (c[2] - 1.0).abs() < 1e-9);
    assert!((sol.radius - 5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn spiral_center_is_its_limit() {
    let s = SpaceDescriptor::euclidean(2);
    let o = SequenceOracle::from_fn(s, 200, true, |n| {
        let r = 0.97f64.powi(n as i32);
        Point::vector([0.5 + r * (n as f64).cos(), -1.0 + r * (n as f64).sin()])
    })
    .unwrap();
    let c = asymptotic_center(&o, &TailWindow::default(), &SolverConfig::default()).unwrap();
    let v = c.center.as_vector().unwrap();
    assert!(c.radius < 0.97f64.powi(100) + 1e-9);
    assert!((v[0] - 0.5).abs() < 0.06 && (v[1] + 1.0).abs() < 0.06);
}

#[test]
fn constant_sequence_has_zero_radius() {
    let s = SpaceDescriptor::lp(3, 4.0).unwrap();
    let o = SequenceOracle::constant(s, Point::vector([1.0, -2.0, 0.5]), 16);
    let c = asymptotic_center(&o, &TailWindow::default(), &SolverConfig::default()).unwrap();
    assert!(c.radius <= 1e-9);
}

#[test]
fn short_and_unbounded_sequences_are_rejected() {
    let s = SpaceDescriptor::euclidean(1);
    let short = SequenceOracle::from_points(s.clone(), vec![Point::vector([0.0]); 3], true).unwrap();
    assert!(asymptotic_center(&short, &TailWindow::default(), &SolverConfig::default()).is_err());
    let grow = SequenceOracle::from_fn(s, 16, false, |n| Point::vector([n as f64])).unwrap();
    assert!(asymptotic_center(&grow, &TailWindow::default(), &SolverConfig::default()).is_err());
    assert!(TailWindow::new(0.8, 0.5).is_err());
}
