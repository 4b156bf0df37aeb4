//! Nonexpansive maps on bounded hosts: orbits, fixed points through
//! asymptotic centers, the PAR condition, the polar-convergence pipeline,
//! and Opial-condition sampling.

use serde::{Deserialize, Serialize};

use crate::analysis::{weak_pairing_test, TestFamily, WeakVerdict};
use crate::asymptotic::{asymptotic_center, CenterResult, SequenceOracle, SolverConfig, TailWindow};
use crate::convergence::{polar_test, ConvergenceVerdict, SubsequenceSpec};
use crate::extraction::{extract_strong_delta, ExtractionSchedule};
use crate::numeric::compensated_sum;
use crate::spaces::{sample_probes, Norm, Point, ProbeConfig, ProbeSet, ProbeStrategy, SpaceDescriptor, SpaceKind};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapDescriptor {
    /// x ↦ −x
    Reflection,
    /// Rotation of the first two coordinates.
    Rotation { angle: f64 },
    /// x ↦ (1 − λ)x + λc
    AffineAverage { lambda: f64, target: Vec<f64> },
    /// x ↦ Ax
    LinearClamped { matrix: Vec<Vec<f64>> },
    /// Applied left to right.
    Composite { maps: Vec<MapDescriptor> },
}

/// A map together with its bounded host. Outputs are mapped back into the
/// host ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonexpansiveMap {
    pub map: MapDescriptor,
    pub host: SpaceDescriptor,
}

impl NonexpansiveMap {
    pub fn new(map: MapDescriptor, host: SpaceDescriptor) -> Result<Self> {
        let SpaceKind::ClampedBall { base, radius } = &host.kind else {
            return Err(Error::Domain("maps need a bounded host (a clamped ball)".into()));
        };
        let dim = host.dim().ok_or_else(|| Error::Domain("the host must be a vector space".into()))?;
        validate(&map, base, *radius, dim)?;
        Ok(NonexpansiveMap { map, host })
    }

    pub fn dim(&self) -> usize {
        self.host.dim().expect("validated")
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let y = apply_raw(&self.map, x);
        match self.host.project(Point::Vector(y)) {
            Point::Vector(v) => v,
            _ => unreachable!("projection keeps the representation"),
        }
    }

    fn point(&self, x: &Point) -> Result<Vec<f64>> {
        if !self.host.contains(x) {
            return Err(Error::Domain("starting point lies outside the host ball".into()));
        }
        self.host.coords(x)
    }

    /// Largest ratio d(Tx, Ty) / d(x, y) over seeded pairs from the host.
    pub fn lipschitz_probe(&self, pairs: usize, seed: u64) -> Result<f64> {
        let r = self.host.ball_radius().expect("validated");
        let origin = Point::Vector(vec![0.0; self.dim()]);
        let cfg = ProbeConfig::new(ProbeStrategy::BallUniform, 2 * pairs.max(1), seed, r);
        let pts = sample_probes(&self.host, &origin, &cfg, None)?.points;
        let norm = self.host.norm().expect("normed host");
        let mut worst = 0.0f64;
        for pair in pts.chunks_exact(2) {
            let (a, b) = (self.host.coords(&pair[0])?, self.host.coords(&pair[1])?);
            let d = norm.value(&diff(&a, &b));
            if d > 0.0 {
                worst = worst.max(norm.value(&diff(&self.apply(&a), &self.apply(&b))) / d);
            }
        }
        Ok(worst)
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn validate(map: &MapDescriptor, base: &SpaceKind, radius: f64, dim: usize) -> Result<()> {
    match map {
        MapDescriptor::Reflection => Ok(()),
        MapDescriptor::Rotation { angle } => {
            if !matches!(base, SpaceKind::Euclidean { .. }) {
                return Err(Error::Domain("rotations are isometries only for the Euclidean norm".into()));
            }
            if dim < 2 || !angle.is_finite() {
                return Err(Error::Domain("rotation needs dimension ≥ 2 and a finite angle".into()));
            }
            Ok(())
        }
        MapDescriptor::AffineAverage { lambda, target } => {
            if !(0.0..=1.0).contains(lambda) {
                return Err(Error::Domain(format!("λ must lie in [0, 1], got {lambda}")));
            }
            if target.len() != dim {
                return Err(Error::Domain("target dimension mismatch".into()));
            }
            let host = SpaceDescriptor::new(base.clone())?;
            if host.norm().expect("vector base").value(target) > radius * (1.0 + 1e-12) {
                return Err(Error::Domain("target lies outside the host ball".into()));
            }
            Ok(())
        }
        MapDescriptor::LinearClamped { matrix } => {
            if matrix.len() != dim || matrix.iter().any(|row| row.len() != dim) {
                return Err(Error::Domain(format!("matrix must be {dim}×{dim}")));
            }
            if matrix.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Domain("matrix entries must be finite".into()));
            }
            Ok(())
        }
        MapDescriptor::Composite { maps } => maps.iter().try_for_each(|m| validate(m, base, radius, dim)),
    }
}

fn apply_raw(map: &MapDescriptor, x: &[f64]) -> Vec<f64> {
    match map {
        MapDescriptor::Reflection => x.iter().map(|v| -v).collect(),
        MapDescriptor::Rotation { angle } => {
            let (s, c) = angle.sin_cos();
            let mut y = x.to_vec();
            y[0] = c * x[0] - s * x[1];
            y[1] = s * x[0] + c * x[1];
            y
        }
        MapDescriptor::AffineAverage { lambda, target } => {
            x.iter().zip(target).map(|(a, t)| (1.0 - lambda) * a + lambda * t).collect()
        }
        MapDescriptor::LinearClamped { matrix } => {
            matrix.iter().map(|row| compensated_sum(row.iter().zip(x).map(|(a, b)| a * b))).collect()
        }
        MapDescriptor::Composite { maps } => maps.iter().fold(x.to_vec(), |acc, m| apply_raw(m, &acc)),
    }
}

/// n ↦ Tⁿ(x₀) for n < horizon.
pub fn orbit(map: &NonexpansiveMap, x0: &Point, horizon: usize) -> Result<SequenceOracle> {
    let mut x = map.point(x0)?;
    let mut pts = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let next = map.apply(&x);
        pts.push(Point::Vector(std::mem::replace(&mut x, next)));
    }
    SequenceOracle::from_points(map.host.clone(), pts, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointConfig {
    pub horizon: usize,
    pub window: TailWindow,
    pub solver: SolverConfig,
    pub residual_floor: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig { horizon: 256, window: TailWindow::default(), solver: SolverConfig::default(), residual_floor: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointResult {
    pub point: Point,
    pub residual: f64,
    pub tolerance: f64,
    pub success: bool,
    pub center: CenterResult,
}

/// The asymptotic center of the orbit and its residual d(c, T(c)).
pub fn fixed_point_via_center(map: &NonexpansiveMap, x0: &Point, cfg: &FixedPointConfig) -> Result<FixedPointResult> {
    if !map.host.claims_sr {
        return Err(Error::Refused("fixed points through asymptotic centers need a rotund host".into()));
    }
    let o = orbit(map, x0, cfg.horizon)?;
    let center = asymptotic_center(&o, &cfg.window, &cfg.solver)?;
    let c = map.host.coords(&center.center)?;
    let residual = map.host.norm().expect("normed host").value(&diff(&c, &map.apply(&c)));
    let tolerance = cfg.residual_floor.max(10.0 * center.optimality_gap);
    Ok(FixedPointResult { point: center.center.clone(), residual, tolerance, success: residual <= tolerance, center })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParRow {
    pub epsilon: f64,
    /// Least position in the subsequence from which the inequality holds
    /// through the horizon.
    pub n_bar: Option<usize>,
    pub last_violation: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParReport {
    pub subsequence: SubsequenceSpec,
    pub candidate: Point,
    pub rows: Vec<ParRow>,
    pub pass: bool,
    /// (ε, orbit index k_n) of the first failing row.
    pub violation: Option<(f64, usize)>,
}

pub fn default_par_epsilons() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

/// For each ε: d(T^{k_n−1}x, y) < d(T^{k_n}x, y) + ε from some n̄ on. A row
/// passes when no violation falls in the final quarter of the subsequence.
pub fn par_check(
    map: &NonexpansiveMap,
    x0: &Point,
    spec: &SubsequenceSpec,
    y: &Point,
    epsilons: &[f64],
) -> Result<ParReport> {
    let horizon = spec.indices().last().map_or(0, |k| k + 1);
    let o = orbit(map, x0, horizon)?;
    let host = &map.host;
    let idx: Vec<usize> = spec.indices().iter().copied().filter(|&k| k >= 1).collect();
    let len = idx.len();
    let quarter_start = len - len.div_ceil(4).min(len);
    let pairs: Vec<(f64, f64)> = idx
        .iter()
        .map(|&k| Ok((host.distance(o.point(k - 1), y)?, host.distance(o.point(k), y)?)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut violation = None;
    for &eps in epsilons {
        let last_bad = pairs.iter().rposition(|(before, after)| !(before < &(after + eps)));
        let n_bar = match last_bad {
            None => Some(0),
            Some(j) if j + 1 < len => Some(j + 1),
            Some(_) => None,
        };
        let pass = last_bad.is_none_or(|j| j < quarter_start);
        if !pass && violation.is_none() {
            violation = Some((eps, idx[last_bad.expect("failing row")]));
        }
        rows.push(ParRow { epsilon: eps, n_bar, last_violation: last_bad, pass });
    }
    Ok(ParReport {
        subsequence: spec.clone(),
        candidate: y.clone(),
        pass: rows.iter().all(|r| r.pass),
        rows,
        violation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub horizon: usize,
    pub window: TailWindow,
    pub solver: SolverConfig,
    pub schedule: ExtractionSchedule,
    pub epsilons: Vec<f64>,
    pub probes: usize,
    pub lipschitz_pairs: usize,
    pub residual_tol: f64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            horizon: 128,
            window: TailWindow::default(),
            solver: SolverConfig::default(),
            schedule: ExtractionSchedule::default(),
            epsilons: default_par_epsilons(),
            probes: 32,
            lipschitz_pairs: 500,
            residual_tol: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checklist {
    pub bounded: bool,
    pub sr: bool,
    pub nonexpansive: bool,
    pub par: bool,
    pub polar: bool,
    pub residual: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub checklist: Checklist,
    pub lipschitz: f64,
    pub extracted_indices: Vec<usize>,
    pub extracted_radius: f64,
    pub candidate: Point,
    pub par: ParReport,
    /// Only run when PAR holds for the extracted pair.
    pub polar: Option<ConvergenceVerdict>,
    pub residual: f64,
    pub failed_hypothesis: Option<String>,
}

impl PipelineReport {
    pub fn certified(&self) -> bool {
        let c = &self.checklist;
        c.bounded && c.sr && c.nonexpansive && c.par && c.polar && c.residual
    }
}

/// Extract a strong-Δ subsequence of the orbit, check PAR for it and its
/// center y, and only then test polar convergence of the whole orbit to y.
pub fn polar2fix_pipeline(map: &NonexpansiveMap, x0: &Point, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let host = &map.host;
    let lipschitz = map.lipschitz_probe(cfg.lipschitz_pairs, cfg.seed)?;
    let o = orbit(map, x0, cfg.horizon)?;
    let trace = extract_strong_delta(&o, &cfg.window, &ExtractionSchedule { seed: cfg.seed, ..cfg.schedule.clone() }, &cfg.solver)?;
    let y = trace.center.center.clone();
    let spec = SubsequenceSpec::new(trace.final_indices.clone())?;
    let par = par_check(map, x0, &spec, &y, &cfg.epsilons)?;
    let yc = host.coords(&y)?;
    let residual = host.norm().expect("normed host").value(&diff(&yc, &map.apply(&yc)));
    let polar = if par.pass {
        let scale = trace.center.radius.max(0.5);
        let probes = sample_probes(host, &y, &ProbeConfig::new(ProbeStrategy::BallUniform, cfg.probes, cfg.seed, scale), None)?;
        let probes = ProbeSet::union(vec![probes, ProbeSet::new("origin", vec![Point::Vector(vec![0.0; map.dim()])])])
            .excluding_near(host, &y, 1e-9)?;
        Some(polar_test(&o, &y, &probes, &cfg.window)?)
    } else {
        None
    };
    let checklist = Checklist {
        bounded: host.ball_radius().is_some(),
        sr: host.claims_sr,
        nonexpansive: lipschitz <= 1.0 + 1e-9,
        par: par.pass,
        polar: polar.as_ref().is_some_and(|v| v.is_certified()),
        residual: residual <= cfg.residual_tol,
    };
    let failed_hypothesis = [
        ("bounded", checklist.bounded),
        ("sr", checklist.sr),
        ("nonexpansive", checklist.nonexpansive),
        ("par", checklist.par),
        ("polar", checklist.polar),
        ("residual", checklist.residual),
    ]
    .iter()
    .find(|(_, ok)| !ok)
    .map(|(name, _)| name.to_string());
    Ok(PipelineReport {
        checklist,
        lipschitz,
        extracted_indices: trace.final_indices.clone(),
        extracted_radius: trace.final_radius(),
        candidate: y,
        par,
        polar,
        residual,
        failed_hypothesis,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpialRow {
    pub probe_index: usize,
    pub candidate_min: f64,
    pub probe_min: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpialReport {
    pub weak: WeakVerdict,
    pub rows: Vec<OpialRow>,
    pub pass: bool,
    pub probe_family: String,
}

/// tail-min ‖x_n − x‖ ≤ tail-min ‖x_n − y‖ + tol for every probe, once x is
/// certified as a weak limit against `family`.
pub fn opial_check(
    oracle: &SequenceOracle,
    x: &Point,
    probes: &ProbeSet,
    family: &TestFamily,
    window: &TailWindow,
    weak_tol: f64,
    tol: f64,
) -> Result<OpialReport> {
    let space = oracle.space();
    match space.norm() {
        Some(Norm::L2 | Norm::Lp(_) | Norm::WeightedLp { .. }) => {}
        _ => return Err(Error::Domain("the Opial check needs a Euclidean or Lᵖ space".into())),
    }
    let weak = weak_pairing_test(oracle, x, family, window, weak_tol)?;
    if !weak.is_certified() {
        return Err(Error::Refused("weak convergence to the candidate is not certified".into()));
    }
    let tail = window.tail(oracle.horizon());
    let tail_min = |y: &Point| -> Result<f64> {
        let mut m = f64::INFINITY;
        for k in tail.clone() {
            m = m.min(space.distance(oracle.point(k), y)?);
        }
        Ok(m)
    };
    let candidate_min = tail_min(x)?;
    let mut rows = Vec::new();
    for (j, y) in probes.points.iter().enumerate() {
        let probe_min = tail_min(y)?;
        rows.push(OpialRow { probe_index: j, candidate_min, probe_min, pass: candidate_min <= probe_min + tol });
    }
    Ok(OpialReport { weak, pass: rows.iter().all(|r| r.pass), rows, probe_family: probes.label.clone() })
}
