//! Named, self-checking fixtures for the classical examples. Each run is
//! deterministic in its seed and yields a serializable report whose `pass`
//! flag is the conjunction of its checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    brezis_lieb_check, circle_grid, opial_lp_divergence_demo, oscillating_sequence, smooth_probes, trig_polynomial,
    BlConfig, OpialConfig, Oscillation, TestFamily,
};
use crate::asymptotic::{SequenceOracle, TailWindow};
use crate::convergence::{
    btn_violation_dirichlet, default_challenge, indicator_probes, l1_fixture, linf_fixture, linf_gamma_probe,
    nonunique_strong_delta_demo, polar_nbhd_member, polar_test, strong_delta_test, BtnOptions, SubsequenceSpec,
};
use crate::fixedpoint::{
    default_par_epsilons, fixed_point_via_center, opial_check, orbit, par_check, polar2fix_pipeline, FixedPointConfig,
    MapDescriptor, NonexpansiveMap, PipelineConfig,
};
use crate::numeric::{dot, sub};
use crate::spaces::{sample_probes, Point, ProbeConfig, ProbeSet, ProbeStrategy, QuadRational, SpaceDescriptor, SpaceKind};
use crate::{Error, Result};

pub const FIXTURES: [&str; 11] = [
    "discrete-nbhd",
    "hilbert-halfspace",
    "hybrid-metric",
    "dirichlet-btn",
    "l1-polar",
    "linf-no-polar",
    "indicator-nonunique",
    "reflection",
    "rotation",
    "opial-lp",
    "bl-p4",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub probe_families: Vec<String>,
    pub data: Value,
}

struct Builder {
    checks: Vec<Check>,
    families: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new(), families: Vec::new() }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn family(&mut self, label: &str) {
        if !self.families.iter().any(|f| f == label) {
            self.families.push(label.into());
        }
    }

    fn finish(self, name: &str, description: &str, seed: u64, data: Value) -> FixtureReport {
        FixtureReport {
            name: name.into(),
            description: description.into(),
            seed,
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
            probe_families: self.families,
            data,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn run_fixture(name: &str, seed: u64) -> Result<FixtureReport> {
    match name {
        "discrete-nbhd" => discrete_nbhd(seed),
        "hilbert-halfspace" => hilbert_halfspace(seed),
        "hybrid-metric" => hybrid_metric(seed),
        "dirichlet-btn" => dirichlet_btn(seed),
        "l1-polar" => l1_polar(seed),
        "linf-no-polar" => linf_no_polar(seed),
        "indicator-nonunique" => indicator_nonunique(seed),
        "reflection" => reflection(seed),
        "rotation" => rotation(seed),
        "opial-lp" => opial_lp(seed),
        "bl-p4" => bl_p4(seed),
        other => Err(Error::Configuration(format!(
            "unknown fixture {other:?}; known: {}",
            FIXTURES.join(", ")
        ))),
    }
}

fn discrete_nbhd(seed: u64) -> Result<FixtureReport> {
    let space = SpaceDescriptor::discrete();
    let pts: Vec<Point> = (0..6).map(|i| Point::vector([i as f64])).collect();
    let x = &pts[0];
    let mut b = Builder::new();
    let mut table = Vec::new();
    for y in &pts[1..] {
        let members: Vec<bool> = pts
            .iter()
            .map(|z| polar_nbhd_member(&space, x, std::slice::from_ref(y), z))
            .collect::<Result<_>>()?;
        let only_x = members.iter().enumerate().all(|(i, m)| *m == (i == 0));
        b.check("neighborhood-is-singleton", only_x, format!("N_y(x) for y = {y:?}: {members:?}"));
        table.push(members);
    }
    let rejected = matches!(polar_nbhd_member(&space, x, &[x.clone()], &pts[1]), Err(Error::Domain(_)));
    b.check("x-in-Y-rejected", rejected, "x ∈ Y must be a domain error");

    // eventually constant sequences are the only polarly convergent ones
    let horizon = 32;
    let settle = ChaCha8Rng::seed_from_u64(seed).random_range(1..8);
    let seq: Vec<Point> = (0..horizon).map(|n| if n < settle { pts[1 + n % 5].clone() } else { x.clone() }).collect();
    let oracle = SequenceOracle::from_points(space.clone(), seq, true)?;
    let probes = ProbeSet::new("other points", pts[1..].to_vec());
    b.family(&probes.label);
    let window = TailWindow::default();
    let v = polar_test(&oracle, x, &probes, &window)?;
    b.check("eventually-constant-is-polar", v.is_certified(), format!("{:?} after {settle} transient terms", v.status));
    let alt: Vec<Point> = (0..horizon).map(|n| pts[n % 2].clone()).collect();
    let alt = SequenceOracle::from_points(space, alt, true)?;
    let w = polar_test(&alt, x, &probes, &window)?;
    b.check("alternating-not-polar", w.is_falsified(), format!("{:?}", w.status));
    Ok(b.finish(
        "discrete-nbhd",
        "discrete metric: polar neighborhoods are singletons",
        seed,
        json!({ "membership": table, "eventually_constant": to_value(&v), "alternating": to_value(&w) }),
    ))
}

fn hilbert_halfspace(seed: u64) -> Result<FixtureReport> {
    let dim = 3;
    let space = SpaceDescriptor::euclidean(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |s: f64| -> Vec<f64> { (0..dim).map(|_| s * (2.0 * rng.random::<f64>() - 1.0)).collect() };
    let x = draw(1.0);
    let y = draw(1.0);
    let a: Vec<f64> = x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)).collect();
    let v = sub(&y, &x);
    let mut agree = 0;
    let mut inside = 0;
    let trials = 100;
    for _ in 0..trials {
        let z = draw(2.0);
        let metric = polar_nbhd_member(&space, &Point::Vector(x.clone()), &[Point::Vector(y.clone())], &Point::Vector(z.clone()))?;
        let half = dot(&sub(&z, &a), &v) < 0.0;
        agree += usize::from(metric == half);
        inside += usize::from(half);
    }
    let mut b = Builder::new();
    b.check(
        "membership-matches-halfspace",
        agree == trials,
        format!("{agree}/{trials} agreements, {inside} points inside"),
    );
    Ok(b.finish(
        "hilbert-halfspace",
        "Euclidean polar neighborhood N_y(x) is the open half-space (z - a)·v < 0",
        seed,
        json!({ "x": x, "y": y, "trials": trials, "agreements": agree, "inside": inside }),
    ))
}

fn hybrid_metric(seed: u64) -> Result<FixtureReport> {
    let space = SpaceDescriptor::hybrid(2);
    let x = Point::vector([0.0, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys = vec![Point::vector([1.0, 0.0]), Point::vector([0.0, 0.5]), Point::vector([1e-3, 0.0])];
    for _ in 0..5 {
        ys.push(Point::vector([rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5]));
    }
    let horizon = 256;
    let oracle = SequenceOracle::from_fn(space.clone(), horizon, true, |n| {
        let s = 1.0 / ((n + 1) as f64).powi(2);
        Point::vector([0.6 * s, 0.8 * s])
    })?;
    let mut b = Builder::new();
    let mut min_dist = f64::INFINITY;
    let mut first_member = None;
    for n in 0..horizon {
        min_dist = min_dist.min(space.distance(oracle.point(n), &x)?);
        let m = polar_nbhd_member(&space, &x, &ys, oracle.point(n))?;
        match (m, first_member) {
            (true, None) => first_member = Some(n),
            (false, Some(_)) => first_member = None,
            _ => {}
        }
    }
    b.check("not-metrically-convergent", min_dist >= 1.0, format!("min d(x_n, x) = {min_dist:?}"));
    b.check(
        "eventually-in-N_Y(x)",
        first_member.is_some(),
        format!("x_n ∈ N_Y(x) for all n ≥ {first_member:?}"),
    );
    let probes = ProbeSet::new("fixed finite Y", ys);
    b.family(&probes.label);
    let v = polar_test(&oracle, &x, &probes, &TailWindow::default())?;
    b.check("polar-certified", v.is_certified(), format!("{:?}, margin {:?}", v.status, v.margin));
    Ok(b.finish(
        "hybrid-metric",
        "d = |x - y| + δ(x, y): natural convergence coincides with polar convergence",
        seed,
        json!({ "first_member": first_member, "min_distance": min_dist, "polar": to_value(&v) }),
    ))
}

/// Reference instance: x̄ = 0, ȳ = √2/2, Y = {1}.
pub fn dirichlet_reference() -> (QuadRational, QuadRational, Vec<QuadRational>) {
    (
        QuadRational::zero(),
        QuadRational::from_ratios((0, 1), (1, 2)),
        vec![QuadRational::from_ratios((1, 1), (0, 1))],
    )
}

fn dirichlet_btn(seed: u64) -> Result<FixtureReport> {
    let (x, y, ys) = dirichlet_reference();
    let instances = 50u64;
    let mut failures = 0;
    let mut first = None;
    for i in 0..instances {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        let w = btn_violation_dirichlet(&x, &y, &ys, |z| default_challenge(z, s), &BtnOptions { z_proposal: None, seed: s })?;
        failures += usize::from(!w.holds());
        if first.is_none() {
            first = Some(w);
        }
    }
    let mut b = Builder::new();
    b.check(
        "btn-violated-exactly",
        failures == 0,
        format!("{failures} failures over {instances} seeded challenges"),
    );
    let rational = QuadRational::from_ratios((1, 2), (0, 1));
    let rejected = matches!(
        btn_violation_dirichlet(&x, &rational, &ys, |z| default_challenge(z, seed), &BtnOptions::default()),
        Err(Error::Domain(_))
    );
    b.check("rational-difference-rejected", rejected, "ȳ − x̄ rational must be rejected");
    Ok(b.finish(
        "dirichlet-btn",
        "Dirichlet metric on Q + Q√2: (BTN) fails, checked in exact arithmetic",
        seed,
        json!({ "instances": instances, "failures": failures, "first_witness": to_value(&first) }),
    ))
}

fn l1_polar(seed: u64) -> Result<FixtureReport> {
    let (dim, horizon, head) = (64, 60, 8);
    let oracle = l1_fixture(dim, horizon)?;
    let space = oracle.space().clone();
    let mut alpha = vec![0.0; dim];
    alpha[0] = 1.0;
    alpha[1] = -0.5;
    let alpha_norm = 1.5;
    let support = 2;
    let zero = Point::Vector(vec![0.0; dim]);
    let random = sample_probes(&space, &zero, &ProbeConfig::new(ProbeStrategy::BallUniform, 16, seed, 1.0).with_support(head), None)?;
    let probes = ProbeSet::union(vec![ProbeSet::new("alpha", vec![Point::Vector(alpha.clone())]), random])
        .excluding_near(&space, &zero, 1e-12)?;
    let mut b = Builder::new();
    b.family(&probes.label);
    let mut worst = 0.0f64;
    for k in support..horizon {
        let xk = oracle.point(k);
        let gap = space.distance(xk, &Point::Vector(alpha.clone()))? - space.distance(xk, &zero)?;
        worst = worst.max((gap - alpha_norm).abs());
    }
    b.check("gap-equals-norm-alpha", worst <= 1e-12, format!("max |gap − ‖α‖₁| = {worst:?} for k ≥ {support}"));
    let v = polar_test(&oracle, &zero, &probes, &TailWindow::default())?;
    b.check("polar-certified", v.is_certified(), format!("{:?}", v.status));
    let alpha_gap = v.probes.first().map_or(f64::NAN, |r| r.gap);
    b.check(
        "alpha-margin",
        (alpha_gap - alpha_norm).abs() <= 1e-12,
        format!("tail gap for α = {alpha_gap:?}"),
    );
    Ok(b.finish(
        "l1-polar",
        "x_k = k e_k in the 1-norm is polarly convergent to 0",
        seed,
        json!({ "dim": dim, "horizon": horizon, "alpha_norm": alpha_norm, "polar": to_value(&v) }),
    ))
}

fn linf_no_polar(seed: u64) -> Result<FixtureReport> {
    let (dim, horizon) = (64, 64);
    let oracle = linf_fixture(dim, horizon)?;
    let window = TailWindow::default();
    let zero = Point::Vector(vec![0.0; dim]);
    let ones = ProbeSet::new("all-ones", vec![Point::Vector(vec![1.0; dim])]);
    let mut b = Builder::new();
    b.family(&ones.label);
    let v0 = polar_test(&oracle, &zero, &ones, &window)?;
    b.check("zero-falsified-by-ones", v0.is_falsified(), format!("{:?}", v0.status));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut betas: Vec<Vec<f64>> = Vec::new();
    let mut e3 = vec![0.0; dim];
    e3[3] = 0.5;
    betas.push(e3);
    for _ in 0..4 {
        let n0 = rng.random_range(0..8);
        let mut beta = vec![0.0; dim];
        for c in beta.iter_mut().skip(n0).take(4) {
            *c = 2.0 * rng.random::<f64>() - 1.0;
        }
        beta[n0] = if beta[n0] == 0.0 { 0.25 } else { beta[n0] };
        betas.push(beta);
    }
    let mut verdicts = Vec::new();
    for beta in &betas {
        let (n0, gamma) = linf_gamma_probe(beta)?;
        let probes = ProbeSet::new("gamma", vec![gamma]);
        b.family(&probes.label);
        let v = polar_test(&oracle, &Point::Vector(beta.clone()), &probes, &window)?;
        b.check("beta-falsified-by-gamma", v.is_falsified(), format!("n0 = {n0}: {:?}", v.status));
        verdicts.push(v);
    }
    Ok(b.finish(
        "linf-no-polar",
        "x_k = e_k in the sup norm has no polar limit",
        seed,
        json!({ "zero": to_value(&v0), "betas": betas, "beta_verdicts": to_value(&verdicts) }),
    ))
}

fn indicator_nonunique(seed: u64) -> Result<FixtureReport> {
    let (grid, depth) = (64, 5);
    let demo = nonunique_strong_delta_demo(grid, depth)?;
    let mut b = Builder::new();
    b.check("pairwise-distance-two", demo.min_pair_distance == 2.0, format!("min ‖x_n − x_m‖ = {:?}", demo.min_pair_distance));
    b.check(
        "candidates-separated",
        demo.candidate_separation >= 1.0,
        format!("‖x − x'‖ = {:?}", demo.candidate_separation),
    );
    let verdicts = demo.verdicts.clone().unwrap_or_default();
    let both = verdicts.len() == 2 && verdicts.iter().all(|v| v.is_certified());
    let statuses: Vec<_> = verdicts.iter().map(|v| v.status).collect();
    b.check("both-strong-delta-certified", both, format!("{statuses:?} at tolerance 0"));
    for v in &verdicts {
        b.family(&v.probe_family);
    }
    let mut over = demo.candidates[1].clone();
    if let Point::Vector(v) = &mut over {
        v.iter_mut().for_each(|c| *c *= 1.5);
    }
    let probes = indicator_probes(grid, &over, &demo.candidates)?;
    let bad = strong_delta_test(&demo.oracle, &over, &probes, &demo.window, 1e-12)?;
    b.check("oversized-candidate-falsified", bad.is_falsified(), format!("{:?}", bad.status));
    Ok(b.finish(
        "indicator-nonunique",
        "nested indicators in the sup norm have two distinct strong-Δ limits",
        seed,
        json!({ "demo": to_value(&demo), "oversized": to_value(&bad) }),
    ))
}

fn unit_disc() -> Result<SpaceDescriptor> {
    SpaceDescriptor::ball(SpaceKind::Euclidean { dim: 2 }, 1.0)
}

fn reflection(seed: u64) -> Result<FixtureReport> {
    let map = NonexpansiveMap::new(MapDescriptor::Reflection, unit_disc()?)?;
    let x0 = Point::vector([0.6, 0.3]);
    let zero = Point::vector([0.0, 0.0]);
    let mut b = Builder::new();
    let fp = fixed_point_via_center(&map, &x0, &FixedPointConfig::default())?;
    let c_norm = map.host.distance(&fp.point, &zero)?;
    b.check("center-is-zero", c_norm <= 1e-9, format!("‖c‖ = {c_norm:?}"));
    b.check("residual", fp.residual <= 1e-9, format!("d(c, Tc) = {:?}", fp.residual));

    let o = orbit(&map, &x0, 128)?;
    let probes = sample_probes(&map.host, &zero, &ProbeConfig::new(ProbeStrategy::BallUniform, 16, seed, 1.0), None)?;
    let probes = ProbeSet::union(vec![ProbeSet::new("x0", vec![x0.clone()]), probes]).excluding_near(&map.host, &zero, 1e-12)?;
    b.family(&probes.label);
    let polar = polar_test(&o, &zero, &probes, &TailWindow::default())?;
    b.check("orbit-not-polar", polar.is_falsified(), format!("{:?}", polar.status));

    let even = SubsequenceSpec::new((0..64).map(|k| 2 * k).collect())?;
    let eps = default_par_epsilons();
    let par_zero = par_check(&map, &x0, &even, &zero, &eps)?;
    b.check("par-even-zero-holds", par_zero.pass, "y = 0 on the even subsequence");
    let par_x0 = par_check(&map, &x0, &even, &x0, &eps)?;
    b.check("par-even-x0-fails", !par_x0.pass, format!("violation {:?}", par_x0.violation));

    let pipe = polar2fix_pipeline(&map, &x0, &PipelineConfig { seed, ..PipelineConfig::default() })?;
    b.check(
        "pipeline-reports-failed-hypothesis",
        !pipe.certified() && pipe.failed_hypothesis.is_some(),
        format!("failed hypothesis {:?}", pipe.failed_hypothesis),
    );
    Ok(b.finish(
        "reflection",
        "T(x) = −x on the unit disc: center 0 is fixed, yet the orbit is not polarly convergent",
        seed,
        json!({ "fixed_point": to_value(&fp), "polar": to_value(&polar), "par_zero": to_value(&par_zero),
                "par_x0": to_value(&par_x0), "pipeline": to_value(&pipe) }),
    ))
}

fn rotation(seed: u64) -> Result<FixtureReport> {
    let map = NonexpansiveMap::new(MapDescriptor::Rotation { angle: 1.0 }, unit_disc()?)?;
    let x0 = Point::vector([1.0, 0.0]);
    let zero = Point::vector([0.0, 0.0]);
    let mut b = Builder::new();
    let fp = fixed_point_via_center(&map, &x0, &FixedPointConfig::default())?;
    let c_norm = map.host.distance(&fp.point, &zero)?;
    b.check("center-is-zero", c_norm <= 1e-6, format!("‖c‖ = {c_norm:?}"));
    b.check("residual", fp.residual <= 1e-6, format!("d(c, Tc) = {:?}", fp.residual));
    let full = SubsequenceSpec::full(128)?;
    let par = par_check(&map, &x0, &full, &zero, &default_par_epsilons())?;
    b.check("par-zero-holds", par.pass, "all iterates at distance ‖x0‖ from 0");
    let pipe = polar2fix_pipeline(&map, &x0, &PipelineConfig { seed, ..PipelineConfig::default() })?;
    b.check(
        "pipeline-certifies-polar",
        pipe.certified(),
        format!("checklist {:?}, failed hypothesis {:?}", pipe.checklist, pipe.failed_hypothesis),
    );
    Ok(b.finish(
        "rotation",
        "rotation by 1 rad on the unit disc",
        seed,
        json!({ "fixed_point": to_value(&fp), "par_zero": to_value(&par), "pipeline": to_value(&pipe) }),
    ))
}

fn opial_lp(seed: u64) -> Result<FixtureReport> {
    let cfg = OpialConfig { family: TestFamily { seed, ..TestFamily::default() }, ..OpialConfig::default() };
    let mut b = Builder::new();
    let d4 = opial_lp_divergence_demo(4.0, 512, 128, &cfg)?;
    b.check("weak-limit-certified", d4.weak.is_certified(), format!("worst pairing {:?}", d4.weak.worst));
    b.family(&d4.weak.family);
    b.check("p4-gap", d4.gap > 0.01, format!("‖w − c‖₄ = {:?}", d4.gap));
    let d2 = opial_lp_divergence_demo(2.0, 512, 128, &cfg)?;
    b.check("p2-control-gap", d2.gap <= 1e-3, format!("‖w − c‖₂ = {:?}", d2.gap));

    // Opial's inequality fails at the weak limit: on an alias-free copy of the
    // fixture (frequencies far below the grid resolution) some constant beats a
    let space = circle_grid(512, 4.0)?;
    let osc = Oscillation { amplitude: cfg.b, kappa: cfg.kappa, first_frequency: 1, horizon: 60 };
    let short = oscillating_sequence(&space, &vec![cfg.a; 512], &osc)?;
    let consts: Vec<Point> = (0..=20).map(|i| Point::Vector(vec![cfg.a - 0.5 + 0.05 * i as f64; 512])).collect();
    let probes = ProbeSet::new("constants a ± 0.5 step 0.05", consts).excluding_near(&space, &Point::Vector(vec![cfg.a; 512]), 1e-12)?;
    b.family(&probes.label);
    let w = Point::Vector(vec![cfg.a; 512]);
    let op4 = opial_check(&short, &w, &probes, &cfg.family, &cfg.window, cfg.weak_tol, 1e-9)?;
    let beaten = op4.rows.iter().filter(|r| !r.pass).count();
    b.check("opial-fails-p4", !op4.pass, format!("{beaten} of {} constants beat the weak limit", op4.rows.len()));

    // and holds for e_n in a Euclidean truncation
    let dim = 64;
    let e = SpaceDescriptor::euclidean(dim);
    let en = SequenceOracle::from_fn(e.clone(), dim, true, |n| {
        let mut v = vec![0.0; dim];
        v[n] = 1.0;
        Point::Vector(v)
    })?;
    let zero = Point::Vector(vec![0.0; dim]);
    let hp = sample_probes(&e, &zero, &ProbeConfig::new(ProbeStrategy::BallUniform, 32, seed, 1.0).with_support(8), None)?;
    b.family(&hp.label);
    let op2 = opial_check(&en, &zero, &hp, &TestFamily::head(8), &TailWindow::default(), 0.05, 1e-12)?;
    b.check("opial-holds-hilbert", op2.pass, format!("{} probes", op2.rows.len()));
    Ok(b.finish(
        "opial-lp",
        "u_n = a + b(sin nt + κ cos 2nt) on (0, 2π): weak limit and asymptotic center differ for p ≠ 2",
        seed,
        json!({ "p4": to_value(&d4), "p2": to_value(&d2), "opial_p4": to_value(&op4), "opial_hilbert": to_value(&op2) }),
    ))
}

/// u + sin(n·) on a circle grid, with the first tail frequency below the
/// aliasing limit of the quartic terms.
pub fn bl_fixture(p: f64, grid: usize, horizon: usize, u: &[f64]) -> Result<SequenceOracle> {
    let space = circle_grid(grid, p)?;
    oscillating_sequence(&space, u, &Oscillation { amplitude: 1.0, kappa: 0.0, first_frequency: 1, horizon })
}

fn bl_p4(seed: u64) -> Result<FixtureReport> {
    let (p, grid, horizon) = (4.0, 256, 64);
    let u = trig_polynomial(grid, 0.5, &[(1, 0.3, 0.0)]);
    let oracle = bl_fixture(p, grid, horizon, &u)?;
    let space = oracle.space().clone();
    let probes = smooth_probes(&space, &u, 24, seed, 1.0, 4)?;
    let cfg = BlConfig { family: TestFamily { seed, ..TestFamily::default() }, ..BlConfig::default() };
    let mut b = Builder::new();
    b.family(&probes.label);
    b.family(&cfg.family.label());
    let up = Point::Vector(u.clone());
    let r = brezis_lieb_check(&oracle, &up, &probes, &cfg)?;
    b.check("deficit-nonnegative", r.pass, format!("tail-min D_n = {:?}", r.tail_min));
    b.check("strictly-positive", r.strictly_positive, "equality fails for p = 4");
    let constant = SequenceOracle::constant(space, up.clone(), horizon);
    let c = brezis_lieb_check(&constant, &up, &probes, &cfg)?;
    b.check("constant-deficit-zero", c.tail_max_abs == 0.0, format!("max |D_n| = {:?}", c.tail_max_abs));
    Ok(b.finish(
        "bl-p4",
        "Brezis-Lieb type deficit for u_n = u + sin(n·) in L⁴ of a circle grid",
        seed,
        json!({ "oscillating": to_value(&r), "constant": to_value(&c) }),
    ))
}
