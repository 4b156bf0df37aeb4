//! Seeded probe families: the finite stand-in for "every y in E".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{ratio, Point, QuadRational, SpaceDescriptor, SpaceKind};
use crate::asymptotic::{SequenceOracle, TailWindow};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStrategy {
    BallUniform,
    TailPointEcho,
    SegmentTowardTail,
    CoordinateBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub count: usize,
    pub seed: u64,
    pub radius_scale: f64,
    pub strategy: ProbeStrategy,
    /// Restrict perturbations to the leading coordinates (sequence-space
    /// truncations, where a fixed vector lives in a finite head).
    #[serde(default)]
    pub support: Option<usize>,
}

impl ProbeConfig {
    pub fn new(strategy: ProbeStrategy, count: usize, seed: u64, radius_scale: f64) -> Self {
        ProbeConfig { count, seed, radius_scale, strategy, support: None }
    }

    pub fn with_support(mut self, head: usize) -> Self {
        self.support = Some(head);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Configuration("probe count must be at least 1".into()));
        }
        if !(self.radius_scale.is_finite() && self.radius_scale > 0.0) {
            return Err(Error::Configuration("probe radius scale must be positive".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let strat = match self.strategy {
            ProbeStrategy::BallUniform => "ball-uniform",
            ProbeStrategy::TailPointEcho => "tail-point-echo",
            ProbeStrategy::SegmentTowardTail => "segment-toward-tail",
            ProbeStrategy::CoordinateBump => "coordinate-bump",
        };
        let mut s = format!("{strat}(count={}, seed={}, scale={})", self.count, self.seed, self.radius_scale);
        if let Some(h) = self.support {
            s.push_str(&format!("[head={h}]"));
        }
        s
    }
}

/// A named, finite family of probe points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub label: String,
    pub points: Vec<Point>,
}

impl ProbeSet {
    pub fn new(label: impl Into<String>, points: Vec<Point>) -> Self {
        ProbeSet { label: label.into(), points }
    }

    /// Concatenates families, keeping labels.
    pub fn union(sets: Vec<ProbeSet>) -> ProbeSet {
        let label = sets.iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(" + ");
        ProbeSet { label, points: sets.into_iter().flat_map(|s| s.points).collect() }
    }

    /// Drops probes closer than `min_dist` to `x` (in particular x itself).
    pub fn excluding_near(mut self, space: &SpaceDescriptor, x: &Point, min_dist: f64) -> Result<ProbeSet> {
        let mut kept = Vec::with_capacity(self.points.len());
        for p in self.points {
            if space.distance(&p, x)? > min_dist {
                kept.push(p);
            }
        }
        self.points = kept;
        if min_dist > 0.0 {
            self.label.push_str(&format!(" \\ B({min_dist})"));
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `cfg.count` probes around `center`. Deterministic given the seed.
pub fn sample_probes(
    space: &SpaceDescriptor,
    center: &Point,
    cfg: &ProbeConfig,
    context: Option<&SequenceOracle>,
) -> Result<ProbeSet> {
    cfg.validate()?;
    space.check_point(center)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let needs_context = matches!(cfg.strategy, ProbeStrategy::TailPointEcho | ProbeStrategy::SegmentTowardTail);
    let tail: Vec<&Point> = match (needs_context, context) {
        (true, None) => {
            return Err(Error::Configuration(format!("{} probes need a sequence", cfg.label())));
        }
        (true, Some(o)) => o.points()[TailWindow::default().tail(o.horizon())].iter().collect(),
        _ => Vec::new(),
    };
    if needs_context && tail.is_empty() {
        return Err(Error::Configuration("sequence tail is empty".into()));
    }
    let mut points = Vec::with_capacity(cfg.count);
    for k in 0..cfg.count {
        let p = match cfg.strategy {
            ProbeStrategy::BallUniform => ball_point(space, center, cfg, &mut rng)?,
            ProbeStrategy::CoordinateBump => bump_point(space, center, cfg, k, &mut rng)?,
            ProbeStrategy::TailPointEcho => tail[rng.random_range(0..tail.len())].clone(),
            ProbeStrategy::SegmentTowardTail => {
                let target = tail[rng.random_range(0..tail.len())];
                let t: f64 = 1.0 - rng.random::<f64>();
                segment_point(space, center, target, t)?
            }
        };
        points.push(space.project(p));
    }
    Ok(ProbeSet { label: cfg.label(), points })
}

fn perturbable(cfg: &ProbeConfig, dim: usize) -> usize {
    cfg.support.map_or(dim, |h| h.min(dim).max(1))
}

fn ball_point(space: &SpaceDescriptor, center: &Point, cfg: &ProbeConfig, rng: &mut ChaCha8Rng) -> Result<Point> {
    match (&space.kind, center) {
        (SpaceKind::DirichletMetric, Point::Quad(c)) => Ok(Point::Quad(quad_jitter(c, cfg.radius_scale, rng))),
        (_, Point::Quad(_)) => Err(Error::Representation("quadratic irrational outside the Dirichlet metric".into())),
        (_, Point::IndexSet(_)) | (_, Point::Vector(_)) => {
            let base = match space.dim() {
                Some(_) => space.coords(center)?,
                None => match center {
                    Point::Vector(v) => v.clone(),
                    _ => return Err(Error::Representation("discrete probes need vector points".into())),
                },
            };
            let dim = base.len();
            let active = perturbable(cfg, dim);
            let mut dir: Vec<f64> = (0..dim)
                .map(|i| if i < active { rng.sample::<f64, _>(StandardNormal) } else { 0.0 })
                .collect();
            let len = space.norm().map_or_else(|| crate::numeric::norm2(&dir), |n| n.value(&dir));
            if len == 0.0 {
                dir[0] = 1.0;
            }
            let len = if len == 0.0 { 1.0 } else { len };
            let u: f64 = rng.random();
            let r = cfg.radius_scale * u.powf(1.0 / active as f64);
            Ok(Point::Vector(base.iter().zip(&dir).map(|(c, d)| c + r * d / len).collect()))
        }
    }
}

fn quad_jitter(c: &QuadRational, scale: f64, rng: &mut ChaCha8Rng) -> QuadRational {
    let den = 64i64;
    let span = ((scale * den as f64).floor() as i64).max(1);
    let da = rng.random_range(-span..=span);
    let db = rng.random_range(-span / 2..=span / 2);
    QuadRational::new(&c.a + ratio(da, den), &c.b + ratio(db, den))
}

fn bump_point(
    space: &SpaceDescriptor,
    center: &Point,
    cfg: &ProbeConfig,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Point> {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    match (&space.kind, center) {
        (SpaceKind::DirichletMetric, Point::Quad(c)) => {
            let step = super::rational_from_f64(sign * cfg.radius_scale);
            let shifted = if (k / 2) % 2 == 0 {
                QuadRational::new(&c.a + step, c.b.clone())
            } else {
                QuadRational::new(c.a.clone(), &c.b + step)
            };
            Ok(Point::Quad(shifted))
        }
        _ if space.dim().is_none() => ball_point(space, center, cfg, rng),
        _ => {
            let mut v = space.coords(center)?;
            let active = perturbable(cfg, v.len());
            let i = (k / 2) % active;
            let unit = space.norm().map_or(1.0, |n| n.unit_norm(i));
            v[i] += sign * cfg.radius_scale / unit;
            Ok(Point::Vector(v))
        }
    }
}

fn segment_point(space: &SpaceDescriptor, center: &Point, target: &Point, t: f64) -> Result<Point> {
    if space.dim().is_some() {
        let (c, x) = (space.coords(center)?, space.coords(target)?);
        return Ok(Point::Vector(c.iter().zip(&x).map(|(a, b)| a + t * (b - a)).collect()));
    }
    // Without linear structure: halve toward the target while midpoints exist.
    let mut p = target.clone();
    let mut s = 1.0;
    while s / 2.0 >= t {
        match space.midpoint(center, &p)? {
            Some(m) => p = m,
            None => break,
        }
        s /= 2.0;
    }
    Ok(p)
}
