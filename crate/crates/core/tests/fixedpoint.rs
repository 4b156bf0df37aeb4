use polarconv::fixedpoint::{
    fixed_point_via_center, orbit, polar2fix_pipeline, FixedPointConfig, MapDescriptor, NonexpansiveMap, PipelineConfig,
};
use polarconv::spaces::{Point, SpaceDescriptor, SpaceKind};
use proptest::prelude::*;

fn disc() -> SpaceDescriptor {
    SpaceDescriptor::ball(SpaceKind::Euclidean { dim: 2 }, 1.0).unwrap()
}

fn map(m: MapDescriptor) -> NonexpansiveMap {
    NonexpansiveMap::new(m, disc()).unwrap()
}

/// Symmetric matrix with eigenvalue 1 along (cos θ, sin θ) and μ across it.
fn projector_like(theta: f64, mu: f64) -> Vec<Vec<f64>> {
    let (c, s) = (theta.cos(), theta.sin());
    vec![vec![c * c + mu * s * s, (1.0 - mu) * c * s], vec![(1.0 - mu) * c * s, s * s + mu * c * c]]
}

fn all_maps() -> Vec<MapDescriptor> {
    vec![
        MapDescriptor::Reflection,
        MapDescriptor::Rotation { angle: 1.0 },
        MapDescriptor::AffineAverage { lambda: 0.4, target: vec![0.3, -0.2] },
        MapDescriptor::LinearClamped { matrix: projector_like(0.7, 0.3) },
        MapDescriptor::Composite {
            maps: vec![MapDescriptor::Rotation { angle: 0.5 }, MapDescriptor::AffineAverage { lambda: 0.5, target: vec![0.0, 0.5] }],
        },
    ]
}

#[test]
fn maps_are_nonexpansive() {
    for m in all_maps() {
        let t = map(m.clone());
        let l = t.lipschitz_probe(2000, 5).unwrap();
        assert!(l <= 1.0 + 1e-9, "{m:?}: Lipschitz estimate {l}");
    }
}

#[test]
fn expansive_maps_fail_the_checklist() {
    let t = map(MapDescriptor::LinearClamped { matrix: vec![vec![2.0, 0.0], vec![0.0, 1.0]] });
    assert!(t.lipschitz_probe(500, 1).unwrap() > 1.5);
    let r = polar2fix_pipeline(&t, &Point::vector([0.1, 0.1]), &PipelineConfig::default()).unwrap();
    assert_eq!(r.failed_hypothesis.as_deref(), Some("nonexpansive"));
    assert!(NonexpansiveMap::new(MapDescriptor::Reflection, SpaceDescriptor::euclidean(2)).is_err());
}

#[test]
fn rotation_center_matches_grid_search() {
    let t = map(MapDescriptor::Rotation { angle: 1.0 });
    let x0 = Point::vector([0.5, 0.2]);
    let fp = fixed_point_via_center(&t, &x0, &FixedPointConfig::default()).unwrap();
    let o = orbit(&t, &x0, FixedPointConfig::default().horizon).unwrap();
    let tail: Vec<&[f64]> = o.points()[FixedPointConfig::default().window.tail(o.horizon())].iter().map(|p| p.as_vector().unwrap()).collect();
    let worst = |c: [f64; 2]| tail.iter().map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()).fold(0.0, f64::max);
    let search = |lo: [f64; 2], span: f64, step: f64| {
        let n = (span / step).round() as i64;
        let mut best = ([0.0, 0.0], f64::INFINITY);
        for i in 0..=n {
            for j in 0..=n {
                let c = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
                let r = worst(c);
                if r < best.1 {
                    best = (c, r);
                }
            }
        }
        best
    };
    let coarse = search([-1.0, -1.0], 2.0, 0.02);
    let fine = search([coarse.0[0] - 0.03, coarse.0[1] - 0.03], 0.06, 1e-3);
    let c = fp.point.as_vector().unwrap();
    assert!((c[0] - fine.0[0]).abs() <= 2e-3 && (c[1] - fine.0[1]).abs() <= 2e-3, "center {c:?} vs grid {:?}", fine.0);
    assert!((fp.center.radius - fine.1).abs() <= 1e-3);
    assert!(fp.success && fp.residual <= 1e-6);
}

#[test]
fn linear_orbit_converges_to_the_eigen_projection() {
    let theta = 0.7;
    let a = projector_like(theta, 0.3);
    let t = map(MapDescriptor::LinearClamped { matrix: a.clone() });
    let x0 = [0.4, -0.5];
    // power iteration of the raw matrix
    let mut v = x0;
    for _ in 0..2000 {
        v = [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]];
    }
    let fp = fixed_point_via_center(&t, &Point::vector(x0), &FixedPointConfig::default()).unwrap();
    let c = fp.point.as_vector().unwrap();
    assert!((c[0] - v[0]).abs() < 1e-6 && (c[1] - v[1]).abs() < 1e-6, "{c:?} vs {v:?}");
    let r = polar2fix_pipeline(&t, &Point::vector(x0), &PipelineConfig::default()).unwrap();
    assert!(r.certified(), "{:?}", r.failed_hypothesis);
}

#[test]
fn reflection_pipeline_stops_at_par() {
    let t = map(MapDescriptor::Reflection);
    let r = polar2fix_pipeline(&t, &Point::vector([0.6, 0.3]), &PipelineConfig::default()).unwrap();
    assert!(!r.certified());
    assert_eq!(r.failed_hypothesis.as_deref(), Some("par"));
    assert!(r.polar.is_none());
}

#[test]
fn starting_outside_the_host_is_an_error() {
    let t = map(MapDescriptor::Reflection);
    assert!(orbit(&t, &Point::vector([1.5, 0.0]), 8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orbits_approach_fixed_points_monotonically(r in 0.0..1.0f64, phi in 0.0..6.28f64, lambda in 0.05..0.95f64) {
        let target = vec![0.3, -0.2];
        let t = map(MapDescriptor::AffineAverage { lambda, target: target.clone() });
        let o = orbit(&t, &Point::vector([r * phi.cos(), r * phi.sin()]), 40).unwrap();
        let p = Point::Vector(target);
        let d: Vec<f64> = o.points().iter().map(|x| t.host.distance(x, &p).unwrap()).collect();
        prop_assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn composite_applies_left_to_right(x in -0.5..0.5f64, y in -0.5..0.5f64) {
        let rot = MapDescriptor::Rotation { angle: 0.5 };
        let aff = MapDescriptor::AffineAverage { lambda: 0.5, target: vec![0.0, 0.5] };
        let both = map(MapDescriptor::Composite { maps: vec![rot.clone(), aff.clone()] });
        let step = map(aff).apply(&map(rot).apply(&[x, y]));
        let direct = both.apply(&[x, y]);
        prop_assert!((step[0] - direct[0]).abs() < 1e-12 && (step[1] - direct[1]).abs() < 1e-12);
    }
}
