//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use polarconv::analysis::{circle_grid, oscillating_sequence, smooth_probes, Oscillation};
use polarconv::asymptotic::{SequenceOracle, TailWindow};
use polarconv::convergence::{indicator_probes, l1_fixture, linf_fixture, nonunique_strong_delta_demo};
use polarconv::fixedpoint::{orbit, MapDescriptor, NonexpansiveMap};
use polarconv::spaces::{sample_probes, Point, ProbeConfig, ProbeSet, ProbeStrategy, SpaceDescriptor, SpaceKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub name: String,
    pub oracle: SequenceOracle,
    pub candidate: Point,
    pub probes: ProbeSet,
    pub window: TailWindow,
}

fn ball_probes(space: &SpaceDescriptor, center: &Point, count: usize, seed: u64, scale: f64, head: Option<usize>) -> ProbeSet {
    let mut cfg = ProbeConfig::new(ProbeStrategy::BallUniform, count, seed, scale);
    if let Some(h) = head {
        cfg = cfg.with_support(h);
    }
    sample_probes(space, center, &cfg, None).unwrap().excluding_near(space, center, 1e-9).unwrap()
}

fn case(name: &str, oracle: SequenceOracle, candidate: Point, probes: ProbeSet) -> Case {
    Case { name: name.into(), oracle, candidate, probes, window: TailWindow::default() }
}

fn spiral(space: SpaceDescriptor, c: &[f64], rate: f64, horizon: usize) -> SequenceOracle {
    let c = c.to_vec();
    SequenceOracle::from_fn(space, horizon, true, move |n| {
        let r = rate.powi(n as i32);
        let t = n as f64;
        let mut v = c.clone();
        v[0] += r * t.cos();
        v[1] += r * t.sin();
        Point::Vector(v)
    })
    .unwrap()
}

fn cycle(space: SpaceDescriptor, pts: &[Vec<f64>], horizon: usize) -> SequenceOracle {
    let pts = pts.to_vec();
    SequenceOracle::from_fn(space, horizon, true, move |n| Point::Vector(pts[n % pts.len()].clone())).unwrap()
}

fn disc_map(map: MapDescriptor) -> NonexpansiveMap {
    NonexpansiveMap::new(map, SpaceDescriptor::ball(SpaceKind::Euclidean { dim: 2 }, 1.0).unwrap()).unwrap()
}

/// Bounded sequences with a candidate limit and a probe family, across every
/// space kind that supports the three detectors.
pub fn lattice_cases() -> Vec<Case> {
    let mut out = Vec::new();
    let e2 = SpaceDescriptor::euclidean(2);
    let c = Point::vector([0.3, -0.2]);
    out.push(case("euclid-spiral", spiral(e2.clone(), &[0.3, -0.2], 0.9, 64), c.clone(), ball_probes(&e2, &c, 24, 1, 1.0, None)));

    let zero2 = Point::vector([0.0, 0.0]);
    out.push(case(
        "euclid-alternating",
        cycle(e2.clone(), &[vec![1.0, 0.0], vec![-1.0, 0.0]], 64),
        zero2.clone(),
        ball_probes(&e2, &zero2, 24, 2, 1.0, None),
    ));
    out.push(case(
        "euclid-three-cycle",
        cycle(e2.clone(), &[vec![1.0, 0.0], vec![-0.5, 0.8], vec![-0.5, -0.8]], 63),
        zero2.clone(),
        ball_probes(&e2, &zero2, 24, 3, 1.0, None),
    ));
    out.push(case("euclid-constant", SequenceOracle::constant(e2.clone(), c.clone(), 32), c.clone(), ball_probes(&e2, &c, 16, 4, 1.0, None)));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noisy: Vec<Point> = (0..64)
        .map(|n| {
            let s = 1.0 / (n + 1) as f64;
            Point::vector([1.0 + s * (rng.random::<f64>() - 0.5), 2.0 + s * (rng.random::<f64>() - 0.5)])
        })
        .collect();
    let target = Point::vector([1.0, 2.0]);
    out.push(case(
        "euclid-noisy",
        SequenceOracle::from_points(e2.clone(), noisy, true).unwrap(),
        target.clone(),
        ball_probes(&e2, &target, 24, 6, 0.5, None),
    ));

    let dim = 64;
    let e64 = SpaceDescriptor::euclidean(dim);
    let unit = SequenceOracle::from_fn(e64.clone(), dim, true, |n| {
        let mut v = vec![0.0; dim];
        v[n] = 1.0;
        Point::Vector(v)
    })
    .unwrap();
    let zero64 = Point::Vector(vec![0.0; dim]);
    out.push(case("euclid-unit-vectors", unit, zero64.clone(), ball_probes(&e64, &zero64, 24, 7, 1.0, Some(8))));

    for (i, p) in [1.5, 3.0, 4.0].into_iter().enumerate() {
        let s = SpaceDescriptor::lp(3, p).unwrap();
        let c3 = Point::vector([0.1, 0.2, -0.3]);
        out.push(case(
            &format!("lp{p}-spiral"),
            spiral(s.clone(), &[0.1, 0.2, -0.3], 0.85, 64),
            c3.clone(),
            ball_probes(&s, &c3, 24, 10 + i as u64, 1.0, None),
        ));
        let z3 = Point::vector([0.0, 0.0, 0.0]);
        out.push(case(
            &format!("lp{p}-alternating"),
            cycle(s.clone(), &[vec![1.0, 0.5, 0.0], vec![-1.0, -0.5, 0.0]], 64),
            z3.clone(),
            ball_probes(&s, &z3, 24, 20 + i as u64, 1.0, None),
        ));
    }

    let sup2 = SpaceDescriptor::sup(2);
    out.push(case("sup-spiral", spiral(sup2.clone(), &[0.3, -0.2], 0.9, 64), c.clone(), ball_probes(&sup2, &c, 24, 30, 1.0, None)));

    let linf = linf_fixture(32, 32).unwrap();
    let z32 = Point::Vector(vec![0.0; 32]);
    let linf_probes = ProbeSet::union(vec![
        ProbeSet::new("all-ones", vec![Point::Vector(vec![1.0; 32])]),
        ball_probes(linf.space(), &z32, 16, 31, 1.0, Some(8)),
    ]);
    out.push(case("linf-unit-vectors", linf, z32, linf_probes));

    let l1 = l1_fixture(64, 60).unwrap();
    out.push(case("l1-growing", l1, zero64.clone(), ball_probes(&SpaceDescriptor::l1(64), &zero64, 24, 32, 1.0, Some(8))));

    let demo = nonunique_strong_delta_demo(64, 5).unwrap();
    for (k, cand) in demo.candidates.iter().enumerate() {
        let probes = indicator_probes(64, cand, &demo.candidates).unwrap();
        let mut c = case(&format!("indicator-candidate-{k}"), demo.oracle.clone(), cand.clone(), probes);
        c.window = demo.window;
        out.push(c);
    }

    let x0 = Point::vector([0.6, 0.3]);
    let refl = disc_map(MapDescriptor::Reflection);
    out.push(case("reflection-orbit", orbit(&refl, &x0, 64).unwrap(), zero2.clone(), ball_probes(&refl.host, &zero2, 24, 40, 1.0, None)));
    let rot = disc_map(MapDescriptor::Rotation { angle: 1.0 });
    let start = Point::vector([1.0, 0.0]);
    out.push(case("rotation-orbit", orbit(&rot, &start, 64).unwrap(), zero2.clone(), ball_probes(&rot.host, &zero2, 24, 41, 1.0, None)));
    let aff = disc_map(MapDescriptor::AffineAverage { lambda: 0.3, target: vec![0.2, 0.1] });
    let t = Point::vector([0.2, 0.1]);
    out.push(case("affine-orbit", orbit(&aff, &x0, 64).unwrap(), t.clone(), ball_probes(&aff.host, &t, 24, 42, 1.0, None)));
    let lin = disc_map(MapDescriptor::LinearClamped { matrix: vec![vec![0.5, 0.2], vec![-0.2, 0.5]] });
    out.push(case("linear-orbit", orbit(&lin, &x0, 64).unwrap(), zero2.clone(), ball_probes(&lin.host, &zero2, 24, 43, 1.0, None)));

    for (k, (p, kappa)) in [(2.0, 0.0), (4.0, 0.0), (4.0, 0.5)].into_iter().enumerate() {
        let g = 128;
        let space = circle_grid(g, p).unwrap();
        let base = vec![1.0; g];
        let osc = Oscillation { amplitude: 1.0, kappa, first_frequency: 1, horizon: 24 };
        let o = oscillating_sequence(&space, &base, &osc).unwrap();
        let probes = smooth_probes(&space, &base, 16, 50 + k as u64, 1.0, 3).unwrap();
        out.push(case(&format!("grid-p{p}-kappa{kappa}"), o, Point::Vector(base), probes));
    }

    let hybrid = SpaceDescriptor::hybrid(2);
    let ho = SequenceOracle::from_fn(hybrid.clone(), 64, true, |n| {
        let s = 1.0 / ((n + 1) as f64).powi(2);
        Point::vector([0.6 * s, 0.8 * s])
    })
    .unwrap();
    let hy = ProbeSet::new("hybrid points", vec![Point::vector([1.0, 0.0]), Point::vector([0.0, 0.5]), Point::vector([1e-3, 0.0])]);
    out.push(case("hybrid-decay", ho, zero2.clone(), hy));

    let disc = SpaceDescriptor::discrete();
    let dp: Vec<Point> = (0..4).map(|i| Point::vector([i as f64])).collect();
    let settle = SequenceOracle::from_fn(disc.clone(), 32, true, |n| if n < 5 { dp[1 + n % 3].clone() } else { dp[0].clone() }).unwrap();
    out.push(case("discrete-settling", settle, dp[0].clone(), ProbeSet::new("other points", dp[1..].to_vec())));
    let alt = SequenceOracle::from_fn(disc, 32, true, |n| dp[n % 2].clone()).unwrap();
    out.push(case("discrete-alternating", alt, dp[0].clone(), ProbeSet::new("other points", dp[1..].to_vec())));
    out
}

/// Sequences in a rotund space whose Δ and polar verdicts are compared.
pub fn sr_sequences(space: &SpaceDescriptor) -> Vec<(String, SequenceOracle)> {
    let dim = space.dim().unwrap();
    let mut c = vec![0.0; dim];
    c[0] = 0.3;
    c[1] = -0.2;
    let mut out = vec![("spiral".to_string(), spiral(space.clone(), &c, 0.9, 64))];
    let mut a = vec![0.0; dim];
    a[0] = 1.0;
    a[1] = 0.5;
    let b: Vec<f64> = a.iter().map(|v| -v).collect();
    out.push(("alternating".into(), cycle(space.clone(), &[a.clone(), b], 64)));
    let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
    let noisy: Vec<Point> = (0..64)
        .map(|n| {
            let s = 1.0 / (n + 1) as f64;
            Point::Vector(c.iter().map(|v| v + s * (rng.random::<f64>() - 0.5)).collect())
        })
        .collect();
    out.push(("decaying-noise".into(), SequenceOracle::from_points(space.clone(), noisy, true).unwrap()));
    out
}
