use polarconv::analysis::{brezis_lieb_check, duality_map, smooth_probes, BlConfig, GridFunction};
use polarconv::asymptotic::{asymptotic_center, SequenceOracle};
use polarconv::convergence::{delta_test, polar_test, strong_delta_test, DeltaConfig, Mode};
use polarconv::extraction::extract_strong_delta;
use polarconv::fixedpoint::{fixed_point_via_center, polar2fix_pipeline, FixedPointConfig, NonexpansiveMap, PipelineConfig};
use polarconv::registry::{run_fixture, FIXTURES};
use polarconv::rotund::{estimate_sr_modulus, SrConfig};
use polarconv::spaces::{sample_probes, Point, ProbeConfig, ProbeSet, ProbeStrategy, SpaceDescriptor};
use polarconv::Error;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::report::{csv_table, f, opt, to_json, Check, Outcome};

pub enum Failure {
    /// Bad or inconsistent configuration: exit 2, no report.
    Config(String),
    /// A hypothesis check refused to run: reported as a failed check.
    Refused(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Refused(m) => Failure::Refused(m),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Config(s)
    }
}

type Run = Result<Outcome, Failure>;

fn probe_set(cfg: &ExperimentConfig, space: &SpaceDescriptor, center: &Point, oracle: Option<&SequenceOracle>) -> Result<ProbeSet, Failure> {
    let spec = &cfg.probes;
    let mut sets = Vec::new();
    let fallback = (spec.points.is_empty() && spec.smooth_degree.is_none()).then_some(ProbeStrategy::BallUniform);
    if let Some(strategy) = spec.strategy.or(fallback) {
        let pc = ProbeConfig { count: spec.count, seed: cfg.seed, radius_scale: spec.radius_scale, strategy, support: spec.support };
        sets.push(sample_probes(space, center, &pc, oracle)?);
    }
    if let Some(degree) = spec.smooth_degree {
        let c = space.coords(center)?;
        sets.push(smooth_probes(space, &c, spec.count, cfg.seed, spec.radius_scale, degree)?);
    }
    if !spec.points.is_empty() {
        sets.push(ProbeSet::new("configured points", spec.points.iter().map(|p| Point::Vector(p.clone())).collect()));
    }
    let set = ProbeSet::union(sets).excluding_near(space, center, 1e-12)?;
    if set.is_empty() {
        return Err(Failure::Config("the probe family is empty".into()));
    }
    Ok(set)
}

fn outcome(checks: Vec<Check>, results: serde_json::Value, families: Vec<String>, csv: String) -> Outcome {
    Outcome { checks, results, probe_families: families, notes: Vec::new(), csv }
}

pub fn center(cfg: &ExperimentConfig) -> Run {
    let oracle = cfg.oracle()?;
    let c = asymptotic_center(&oracle, &cfg.window, &cfg.solver)?;
    let space = oracle.space();
    let mut rows = Vec::new();
    for n in 0..oracle.horizon() {
        rows.push(vec![n.to_string(), f(space.distance(oracle.point(n), &c.center)?)]);
    }
    let checks = vec![Check::new(
        "optimality-gap",
        c.optimality_gap <= cfg.tolerances.gap,
        format!("gap {:?} against tolerance {:?}", c.optimality_gap, cfg.tolerances.gap),
    )];
    Ok(outcome(checks, json!({ "center": to_json(&c) }), Vec::new(), csv_table("n,distance", rows)))
}

pub fn classify(cfg: &ExperimentConfig) -> Run {
    let oracle = cfg.oracle()?;
    let space = oracle.space().clone();
    let mut notes = Vec::new();
    let candidate = match cfg.candidate() {
        Some(c) => c,
        None => {
            notes.push("no candidate configured; using the computed asymptotic center".to_string());
            asymptotic_center(&oracle, &cfg.window, &cfg.solver)?.center
        }
    };
    let probes = probe_set(cfg, &space, &candidate, Some(&oracle))?;
    let mut checks = Vec::new();
    let mut verdicts = Vec::new();
    let mut rows = Vec::new();
    for &mode in &cfg.classify.modes {
        let v = match mode {
            Mode::Delta => delta_test(
                &oracle,
                &candidate,
                &probes,
                &cfg.window,
                cfg.tolerances.delta,
                &DeltaConfig { subsamples: cfg.classify.subsamples, seed: cfg.seed },
            )?,
            Mode::StrongDelta => strong_delta_test(&oracle, &candidate, &probes, &cfg.window, cfg.tolerances.strong_delta)?,
            Mode::Polar => polar_test(&oracle, &candidate, &probes, &cfg.window)?,
        }
        .with_policy(cfg.classify.policy);
        checks.push(Check::new(
            &format!("{mode:?}"),
            v.status == cfg.classify.expect,
            format!("{:?} (expected {:?}), margin {:?}", v.status, cfg.classify.expect, v.margin),
        ));
        for r in &v.probes {
            rows.push(vec![format!("{mode:?}"), r.probe_index.to_string(), opt(r.m), f(r.gap)]);
        }
        verdicts.push(v);
    }
    let mut o = outcome(
        checks,
        json!({ "candidate": to_json(&candidate), "verdicts": to_json(&verdicts) }),
        vec![probes.label.clone()],
        csv_table("mode,probe_index,m,gap", rows),
    );
    o.notes = notes;
    Ok(o)
}

pub fn extract(cfg: &ExperimentConfig) -> Run {
    let oracle = cfg.oracle()?;
    let schedule = polarconv::extraction::ExtractionSchedule { seed: cfg.seed, ..cfg.extract.clone() };
    let trace = extract_strong_delta(&oracle, &cfg.window, &schedule, &cfg.solver)?;
    let checks = vec![Check::new(
        "strong-delta-certified",
        trace.verdict.is_certified(),
        format!("{:?} at tolerance {:?}, final radius {:?}", trace.verdict.status, trace.tolerance, trace.final_radius()),
    )];
    let rows = trace
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.source.clone(), s.indices.len().to_string(), f(s.radius), f(s.epsilon)]);
    let csv = csv_table("stage,source,length,radius,epsilon", rows);
    let families = vec![trace.verdict.probe_family.clone()];
    Ok(outcome(checks, json!({ "trace": to_json(&trace) }), families, csv))
}

pub fn sr_modulus(cfg: &ExperimentConfig) -> Run {
    let space = cfg.space()?;
    let sr = cfg.sr.as_ref().ok_or_else(|| Failure::Config("missing [sr] section".into()))?;
    let est = estimate_sr_modulus(&space, sr.r, sr.d_bar, &SrConfig { seed: cfg.seed, ..sr.estimate.clone() })?;
    let consistent = (est.delta_hat > 0.0) == space.claims_sr;
    let checks = vec![Check::new(
        "modulus-matches-claim",
        consistent,
        format!("δ̂ = {:?}, space claims rotundity: {}", est.delta_hat, space.claims_sr),
    )];
    let rows = est.rows.iter().map(|r| vec![f(r.delta), f(r.worst_lens_radius), f(r.bound), r.pass.to_string()]);
    let csv = csv_table("delta,worst_lens_radius,bound,pass", rows);
    Ok(outcome(checks, json!({ "estimate": to_json(&est) }), Vec::new(), csv))
}

pub fn fixedpoint(cfg: &ExperimentConfig) -> Run {
    let m = cfg.map.as_ref().ok_or_else(|| Failure::Config("missing [map] section".into()))?;
    let host = SpaceDescriptor::ball(m.base.clone(), m.radius)?;
    let map = NonexpansiveMap::new(m.map.clone(), host)?;
    let x0 = Point::Vector(m.x0.clone());
    let pc = PipelineConfig { seed: cfg.seed, residual_tol: cfg.tolerances.residual, ..cfg.fixedpoint.clone() };
    let fc = FixedPointConfig {
        horizon: pc.horizon.max(4),
        window: pc.window,
        solver: pc.solver.clone(),
        residual_floor: cfg.tolerances.residual,
    };
    let fp = fixed_point_via_center(&map, &x0, &fc)?;
    let pipe = polar2fix_pipeline(&map, &x0, &pc)?;
    let checks = vec![
        Check::new("fixed-point-residual", fp.success, format!("d(c, Tc) = {:?} against {:?}", fp.residual, fp.tolerance)),
        Check::new(
            "pipeline-certified",
            pipe.certified(),
            format!("checklist {:?}, failed hypothesis {:?}", pipe.checklist, pipe.failed_hypothesis),
        ),
    ];
    let rows = pipe.par.rows.iter().map(|r| vec![f(r.epsilon), opt(r.n_bar), opt(r.last_violation), r.pass.to_string()]);
    let csv = csv_table("epsilon,n_bar,last_violation,pass", rows);
    let families = pipe.polar.iter().map(|v| v.probe_family.clone()).collect();
    Ok(outcome(checks, json!({ "fixed_point": to_json(&fp), "pipeline": to_json(&pipe) }), families, csv))
}

pub fn duality(cfg: &ExperimentConfig) -> Run {
    let d = cfg.duality.as_ref().ok_or_else(|| Failure::Config("missing [duality] section".into()))?;
    let u = match (&d.values, &d.csv) {
        (Some(values), None) => match &d.weights {
            Some(w) => GridFunction::new(values.clone(), w.clone(), d.p)?,
            None => GridFunction::unit_weights(values.clone(), d.p)?,
        },
        (None, Some(path)) => {
            if d.weights.is_some() {
                return Err(Failure::Config("duality.weights conflicts with duality.csv".into()));
            }
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            GridFunction::from_csv(&text, d.p)?
        }
        _ => return Err(Failure::Config("give exactly one of duality.values and duality.csv".into())),
    };
    let star = duality_map(&u)?;
    let norm = u.norm();
    let dual_norm = star.dual_norm();
    let pairing = star.pair(&u);
    let tol = cfg.tolerances.duality;
    let checks = vec![
        Check::new("unit-dual-norm", (dual_norm - 1.0).abs() <= tol, format!("‖u*‖ = {dual_norm:?}")),
        Check::new(
            "pairing-equals-norm",
            (pairing - norm).abs() <= tol * norm.max(1.0),
            format!("⟨u*, u⟩ = {pairing:?}, ‖u‖ = {norm:?}"),
        ),
    ];
    let rows = star.values.iter().zip(&star.weights).enumerate().map(|(i, (v, w))| vec![i.to_string(), f(*w), f(*v)]);
    let csv = csv_table("index,weight,value", rows);
    Ok(outcome(
        checks,
        json!({ "norm": norm, "dual_norm": dual_norm, "pairing": pairing, "dual": to_json(&star) }),
        Vec::new(),
        csv,
    ))
}

pub fn bl_check(cfg: &ExperimentConfig) -> Run {
    let oracle = cfg.oracle()?;
    let space = oracle.space().clone();
    let u = cfg.candidate().ok_or_else(|| Failure::Config("bl-check needs a candidate u".into()))?;
    let probes = probe_set(cfg, &space, &u, Some(&oracle))?;
    let bc = BlConfig {
        window: cfg.window,
        family: cfg.weak.clone(),
        weak_tol: cfg.tolerances.weak,
        tol: cfg.tolerances.deficit,
    };
    let r = brezis_lieb_check(&oracle, &u, &probes, &bc)?;
    let checks = vec![Check::new(
        "deficit",
        r.pass,
        format!("{:?} mode, tail-min {:?}, max |D_n| {:?}", r.mode, r.tail_min, r.tail_max_abs),
    )];
    let csv = r.to_csv();
    Ok(outcome(checks, json!({ "report": to_json(&r) }), vec![probes.label.clone(), bc.family.label()], csv))
}

pub fn examples(cfg: &ExperimentConfig, name: Option<&str>) -> Run {
    let names: Vec<&str> = match name {
        Some(n) => vec![n],
        None => FIXTURES.to_vec(),
    };
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut families = Vec::new();
    let mut rows = Vec::new();
    for n in names {
        let r = run_fixture(n, cfg.seed)?;
        for c in &r.checks {
            checks.push(Check::new(&format!("{}/{}", r.name, c.name), c.pass, c.detail.clone()));
            rows.push(vec![r.name.clone(), c.name.clone(), c.pass.to_string()]);
        }
        for fam in &r.probe_families {
            if !families.contains(fam) {
                families.push(fam.clone());
            }
        }
        reports.push(r);
    }
    Ok(outcome(checks, json!({ "fixtures": to_json(&reports) }), families, csv_table("fixture,check,pass", rows)))
}
