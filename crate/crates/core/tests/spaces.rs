use polarconv::spaces::{dirichlet_distance, Point, QuadRational, SpaceDescriptor, SpaceKind};
use proptest::prelude::*;

fn normed_spaces(dim: usize) -> Vec<SpaceDescriptor> {
    vec![
        SpaceDescriptor::euclidean(dim),
        SpaceDescriptor::lp(dim, 1.5).unwrap(),
        SpaceDescriptor::lp(dim, 4.0).unwrap(),
        SpaceDescriptor::l1(dim),
        SpaceDescriptor::sup(dim),
        SpaceDescriptor::grid((1..=dim).map(|i| 0.5 + i as f64 / dim as f64).collect(), 3.0).unwrap(),
        SpaceDescriptor::hybrid(dim),
    ]
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 3)
}

proptest! {
    #[test]
    fn metric_axioms(a in vec3(), b in vec3(), c in vec3()) {
        for s in normed_spaces(3) {
            let (a, b, c) = (Point::Vector(a.clone()), Point::Vector(b.clone()), Point::Vector(c.clone()));
            let ab = s.distance(&a, &b).unwrap();
            prop_assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - s.distance(&b, &a).unwrap()).abs() <= 1e-12 * (1.0 + ab));
            let via = s.distance(&a, &c).unwrap() + s.distance(&c, &b).unwrap();
            prop_assert!(ab <= via * (1.0 + 1e-12) + 1e-12, "{:?}: {} > {}", s.kind, ab, via);
        }
    }

    #[test]
    fn norms_are_homogeneous(a in vec3(), t in -3.0..3.0f64) {
        for s in normed_spaces(3).into_iter().filter(|s| s.norm().is_some()) {
            let n = s.norm().unwrap();
            let scaled: Vec<f64> = a.iter().map(|v| t * v).collect();
            let lhs = n.value(&scaled);
            let rhs = t.abs() * n.value(&a);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn lp_norm_matches_direct_formula(a in vec3(), p in 1.1..6.0f64) {
        let s = SpaceDescriptor::lp(3, p).unwrap();
        let direct = a.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let got = s.norm().unwrap().value(&a);
        prop_assert!((got - direct).abs() <= 1e-12 * (1.0 + direct));
    }

    #[test]
    fn quad_arithmetic_tracks_floats(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, den in 1i64..20) {
        let x = QuadRational::from_ratios((a, den), (b, den));
        let y = QuadRational::from_ratios((c, den), (d, 1));
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assert!(((x.clone() + y.clone()).to_f64() - (fx + fy)).abs() <= 1e-9);
        prop_assert!(((x.clone() - y.clone()).to_f64() - (fx - fy)).abs() <= 1e-9);
        prop_assert!(((x.clone() * y.clone()).to_f64() - fx * fy).abs() <= 1e-9 * (1.0 + (fx * fy).abs()));
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        }
    }

    #[test]
    fn dirichlet_distance_is_exact_metric(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9, e in -9i64..9, f in -9i64..9) {
        let x = QuadRational::from_ratios((a, 4), (b, 4));
        let y = QuadRational::from_ratios((c, 4), (d, 4));
        let z = QuadRational::from_ratios((e, 4), (f, 4));
        let xy = dirichlet_distance(&x, &y);
        prop_assert_eq!(xy.clone(), dirichlet_distance(&y, &x));
        prop_assert!(dirichlet_distance(&x, &z) + dirichlet_distance(&z, &y) >= xy);
        if x != y {
            // a jump of 1 for irrational differences, 2 for rational ones
            let jump = if (x.clone() - y.clone()).is_rational() { 2 } else { 1 };
            let expected = (x.clone() - y.clone()).abs() + QuadRational::from_ratios((jump, 1), (0, 1));
            prop_assert_eq!(xy, expected);
        }
    }

    #[test]
    fn euclidean_ball_projection(v in prop::collection::vec(-4.0..4.0f64, 2), w in prop::collection::vec(-4.0..4.0f64, 2)) {
        let ball = SpaceDescriptor::ball(SpaceKind::Euclidean { dim: 2 }, 1.5).unwrap();
        let (pv, pw) = (ball.project(Point::Vector(v.clone())), ball.project(Point::Vector(w.clone())));
        prop_assert!(ball.contains(&pv) && ball.contains(&pw));
        let before = SpaceDescriptor::euclidean(2).distance(&Point::Vector(v.clone()), &Point::Vector(w)).unwrap();
        prop_assert!(ball.distance(&pv, &pw).unwrap() <= before + 1e-12);
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if n <= 1.5 {
            prop_assert_eq!(pv, Point::Vector(v));
        }
    }
}

#[test]
fn discrete_metric_is_zero_one() {
    let s = SpaceDescriptor::discrete();
    let (a, b) = (Point::vector([1.0]), Point::vector([2.0]));
    assert_eq!(s.distance(&a, &a).unwrap(), 0.0);
    assert_eq!(s.distance(&a, &b).unwrap(), 1.0);
    assert_eq!(s.midpoint(&a, &b).unwrap(), None);
}

#[test]
fn hybrid_metric_jumps_off_the_diagonal() {
    let s = SpaceDescriptor::hybrid(2);
    let d = s.distance(&Point::vector([0.0, 0.0]), &Point::vector([3.0, 4.0])).unwrap();
    assert!((d - 6.0).abs() < 1e-12);
    let tiny = s.distance(&Point::vector([0.0, 0.0]), &Point::vector([1e-12, 0.0])).unwrap();
    assert!(tiny >= 1.0);
}

#[test]
fn sqrt_two_is_irrational_and_signs_are_exact() {
    let r = QuadRational::from_ratios((0, 1), (1, 1));
    assert!(!r.is_rational());
    // 140/99 < √2 < 99/70, decided without floating point
    assert!(r > QuadRational::from_ratios((140, 99), (0, 1)));
    assert!(r < QuadRational::from_ratios((99, 70), (0, 1)));
    let tiny = QuadRational::from_ratios((-1393, 985), (1, 1));
    assert!(tiny.signum().is_gt());
}

#[test]
fn malformed_spaces_are_rejected() {
    assert!(SpaceDescriptor::lp(3, 1.0).is_err());
    assert!(SpaceDescriptor::grid(vec![1.0, -1.0], 2.0).is_err());
    assert!(SpaceDescriptor::ball(SpaceKind::Euclidean { dim: 2 }, 0.0).is_err());
    let e = SpaceDescriptor::euclidean(2);
    assert!(e.distance(&Point::vector([0.0]), &Point::vector([0.0, 1.0])).is_err());
}
