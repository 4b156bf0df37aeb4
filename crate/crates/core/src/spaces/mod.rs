//! Metric spaces used throughout the crate: a handful of normed vector
//! spaces, three "pathological" metrics (discrete, hybrid, Dirichlet) and
//! closed balls of normed spaces.

use std::cmp::Ordering;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::numeric::{compensated_sum, norm2, sub};
use crate::{Error, Result};

mod probes;
mod quad;

pub use probes::{sample_probes, ProbeConfig, ProbeSet, ProbeStrategy};
pub use quad::{ratio, rational_from_f64, sqrt2_upper_approx, QuadRational};

/// Which metric a [`SpaceDescriptor`] realizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    /// ℝ^dim with the p-norm, 1 < p < ∞.
    LpVec { dim: usize, p: f64 },
    /// ℝ^dim with the 1-norm; a truncation of ℓ¹.
    L1Vec { dim: usize },
    /// ℝ^dim with the max-norm; a truncation of ℓ^∞.
    SupVec { dim: usize },
    /// Functions on a weighted finite grid with the weighted p-norm.
    LpGrid { weights: Vec<f64>, p: f64 },
    Discrete,
    /// |x - y| + δ(x, y) on ℝ^dim.
    HybridNorm { dim: usize },
    /// |x - y| + (1 + D(x - y)) δ(x, y) on ℚ + ℚ√2, D the rationality indicator.
    DirichletMetric,
    /// Closed ball of the given radius around the origin of a normed kind.
    ClampedBall { base: Box<SpaceKind>, radius: f64 },
}

/// A norm on ℝ^d together with a subgradient oracle in the coordinate pairing.
#[derive(Clone, Debug, PartialEq)]
pub enum Norm {
    L2,
    Lp(f64),
    L1,
    Sup,
    WeightedLp { weights: Vec<f64>, p: f64 },
}

impl Norm {
    pub fn value(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L2 => norm2(v),
            Norm::Lp(p) => lp_value(v.iter().map(|x| (1.0, *x)), *p),
            Norm::L1 => compensated_sum(v.iter().map(|x| x.abs())),
            Norm::Sup => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            Norm::WeightedLp { weights, p } => lp_value(weights.iter().copied().zip(v.iter().copied()), *p),
        }
    }

    /// A vector g with ⟨g, v⟩ = ‖v‖ and ⟨g, u⟩ ≤ ‖u‖ for all u.
    pub fn subgradient(&self, v: &[f64]) -> Vec<f64> {
        let n = self.value(v);
        if n == 0.0 {
            return vec![0.0; v.len()];
        }
        match self {
            Norm::L2 => v.iter().map(|x| x / n).collect(),
            Norm::Lp(p) => v.iter().map(|x| lp_grad(1.0, *x / n, *p)).collect(),
            Norm::WeightedLp { weights, p } => {
                weights.iter().zip(v).map(|(w, x)| lp_grad(*w, *x / n, *p)).collect()
            }
            Norm::L1 => v.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() }).collect(),
            Norm::Sup => {
                let k = v.iter().position(|x| x.abs() == n).unwrap_or(0);
                let mut g = vec![0.0; v.len()];
                g[k] = v[k].signum();
                g
            }
        }
    }

    /// All extreme subgradients of the max-norm at coordinates within `rel_tol`
    /// of the maximum; a single subgradient for the smooth norms.
    pub fn subgradient_atoms(&self, v: &[f64], rel_tol: f64) -> Vec<(f64, Vec<f64>)> {
        match self {
            Norm::Sup => {
                let n = self.value(v);
                if n == 0.0 {
                    return vec![(0.0, vec![0.0; v.len()])];
                }
                v.iter()
                    .enumerate()
                    .filter(|(_, x)| x.abs() >= n * (1.0 - rel_tol))
                    .map(|(k, x)| {
                        let mut g = vec![0.0; v.len()];
                        g[k] = x.signum();
                        (x.abs(), g)
                    })
                    .collect()
            }
            _ => vec![(self.value(v), self.subgradient(v))],
        }
    }

    /// Norm of a standard basis vector e_k.
    pub fn unit_norm(&self, k: usize) -> f64 {
        match self {
            Norm::WeightedLp { weights, p } => weights[k].powf(1.0 / p),
            _ => 1.0,
        }
    }
}

fn lp_value<I: Iterator<Item = (f64, f64)>>(terms: I, p: f64) -> f64 {
    let terms: Vec<(f64, f64)> = terms.collect();
    let scale = terms.iter().fold(0.0f64, |m, (_, x)| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s = compensated_sum(terms.iter().map(|(w, x)| w * (x.abs() / scale).powf(p)));
    scale * s.powf(1.0 / p)
}

fn lp_grad(w: f64, x_normalized: f64, p: f64) -> f64 {
    if x_normalized == 0.0 {
        0.0
    } else {
        w * x_normalized.abs().powf(p - 1.0) * x_normalized.signum()
    }
}

/// Point representations. Grid functions on an `LpGrid` space are plain
/// vectors of grid values; the weights live in the space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Point {
    Vector(Vec<f64>),
    Quad(QuadRational),
    /// Indicator function of a set of coordinates.
    IndexSet(Vec<usize>),
}

impl Point {
    pub fn vector(v: impl Into<Vec<f64>>) -> Point {
        Point::Vector(v.into())
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default)]
    pub claims_sr: bool,
    #[serde(default)]
    pub has_menger_midpoints: bool,
}

impl SpaceKind {
    fn validate(&self) -> Result<()> {
        let dim_ok = |d: usize| {
            if d == 0 {
                Err(Error::Configuration("dimension must be at least 1".into()))
            } else {
                Ok(())
            }
        };
        let p_ok = |p: f64| {
            if p.is_finite() && p > 1.0 {
                Ok(())
            } else {
                Err(Error::Configuration(format!("exponent p must satisfy 1 < p < ∞, got {p}")))
            }
        };
        match self {
            SpaceKind::Euclidean { dim } | SpaceKind::L1Vec { dim } | SpaceKind::SupVec { dim } => dim_ok(*dim),
            SpaceKind::HybridNorm { dim } => dim_ok(*dim),
            SpaceKind::LpVec { dim, p } => dim_ok(*dim).and(p_ok(*p)),
            SpaceKind::LpGrid { weights, p } => {
                dim_ok(weights.len())?;
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::Configuration("grid weights must be positive".into()));
                }
                p_ok(*p)
            }
            SpaceKind::Discrete | SpaceKind::DirichletMetric => Ok(()),
            SpaceKind::ClampedBall { base, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Configuration("ball radius must be positive".into()));
                }
                if base.norm().is_none() {
                    return Err(Error::Configuration("clamped ball needs a normed base space".into()));
                }
                base.validate()
            }
        }
    }

    fn default_sr(&self) -> bool {
        match self {
            SpaceKind::Euclidean { .. } | SpaceKind::LpVec { .. } | SpaceKind::LpGrid { .. } => true,
            SpaceKind::ClampedBall { base, .. } => base.default_sr(),
            _ => false,
        }
    }

    fn default_midpoints(&self) -> bool {
        !matches!(self, SpaceKind::Discrete | SpaceKind::HybridNorm { .. } | SpaceKind::DirichletMetric)
    }

    pub fn norm(&self) -> Option<Norm> {
        match self {
            SpaceKind::Euclidean { .. } => Some(Norm::L2),
            SpaceKind::LpVec { p, .. } => Some(Norm::Lp(*p)),
            SpaceKind::L1Vec { .. } => Some(Norm::L1),
            SpaceKind::SupVec { .. } => Some(Norm::Sup),
            SpaceKind::LpGrid { weights, p } => Some(Norm::WeightedLp { weights: weights.clone(), p: *p }),
            SpaceKind::ClampedBall { base, .. } => base.norm(),
            _ => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            SpaceKind::Euclidean { dim }
            | SpaceKind::LpVec { dim, .. }
            | SpaceKind::L1Vec { dim }
            | SpaceKind::SupVec { dim }
            | SpaceKind::HybridNorm { dim } => Some(*dim),
            SpaceKind::LpGrid { weights, .. } => Some(weights.len()),
            SpaceKind::ClampedBall { base, .. } => base.dim(),
            SpaceKind::Discrete | SpaceKind::DirichletMetric => None,
        }
    }
}

impl SpaceDescriptor {
    pub fn new(kind: SpaceKind) -> Result<Self> {
        kind.validate()?;
        Ok(SpaceDescriptor {
            claims_sr: kind.default_sr(),
            has_menger_midpoints: kind.default_midpoints(),
            kind,
        })
    }

    /// Re-validates a descriptor obtained by deserialization and resets the
    /// flags to the values implied by the kind unless `claims_sr` was forced on.
    pub fn normalized(self) -> Result<Self> {
        let forced = self.claims_sr;
        let mut d = SpaceDescriptor::new(self.kind)?;
        d.claims_sr |= forced;
        Ok(d)
    }

    pub fn euclidean(dim: usize) -> Self {
        SpaceDescriptor::new(SpaceKind::Euclidean { dim }).expect("valid dimension")
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        SpaceDescriptor::new(SpaceKind::LpVec { dim, p })
    }

    pub fn sup(dim: usize) -> Self {
        SpaceDescriptor::new(SpaceKind::SupVec { dim }).expect("valid dimension")
    }

    pub fn l1(dim: usize) -> Self {
        SpaceDescriptor::new(SpaceKind::L1Vec { dim }).expect("valid dimension")
    }

    pub fn discrete() -> Self {
        SpaceDescriptor::new(SpaceKind::Discrete).expect("valid")
    }

    pub fn hybrid(dim: usize) -> Self {
        SpaceDescriptor::new(SpaceKind::HybridNorm { dim }).expect("valid dimension")
    }

    pub fn dirichlet() -> Self {
        SpaceDescriptor::new(SpaceKind::DirichletMetric).expect("valid")
    }

    pub fn grid(weights: Vec<f64>, p: f64) -> Result<Self> {
        SpaceDescriptor::new(SpaceKind::LpGrid { weights, p })
    }

    pub fn ball(base: SpaceKind, radius: f64) -> Result<Self> {
        SpaceDescriptor::new(SpaceKind::ClampedBall { base: Box::new(base), radius })
    }

    /// Same metric, with the SR flag forced on. Used to show what goes wrong
    /// when the SR-only harnesses are run on a space that is not SR.
    pub fn with_forced_sr(mut self) -> Self {
        self.claims_sr = true;
        self
    }

    pub fn norm(&self) -> Option<Norm> {
        self.kind.norm()
    }

    pub fn dim(&self) -> Option<usize> {
        self.kind.dim()
    }

    pub fn ball_radius(&self) -> Option<f64> {
        match &self.kind {
            SpaceKind::ClampedBall { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.norm(), Some(Norm::L2))
    }

    /// Vector coordinates of a point in a vector-type space.
    pub fn coords(&self, p: &Point) -> Result<Vec<f64>> {
        let dim = self
            .dim()
            .ok_or_else(|| Error::Representation(format!("{:?} has no coordinates", self.kind)))?;
        match p {
            Point::Vector(v) => {
                if v.len() != dim {
                    return Err(Error::Representation(format!("expected {dim} coordinates, got {}", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Representation("non-finite coordinate".into()));
                }
                Ok(v.clone())
            }
            Point::IndexSet(members) => {
                let mut v = vec![0.0; dim];
                for &k in members {
                    *v.get_mut(k).ok_or_else(|| Error::Representation(format!("index {k} outside grid of {dim}")))? = 1.0;
                }
                Ok(v)
            }
            Point::Quad(_) => Err(Error::Representation("quadratic irrational in a vector space".into())),
        }
    }

    fn quad<'a>(&self, p: &'a Point) -> Result<&'a QuadRational> {
        match p {
            Point::Quad(q) => Ok(q),
            _ => Err(Error::Representation("Dirichlet metric needs points of ℚ + ℚ√2".into())),
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match &self.kind {
            SpaceKind::Discrete => Ok(()),
            SpaceKind::DirichletMetric => self.quad(p).map(|_| ()),
            _ => self.coords(p).map(|_| ()),
        }
    }

    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        match &self.kind {
            SpaceKind::Discrete => Ok(if discrete_eq(self, a, b)? { 0.0 } else { 1.0 }),
            SpaceKind::HybridNorm { .. } => {
                let (x, y) = (self.coords(a)?, self.coords(b)?);
                let e = norm2(&sub(&x, &y));
                Ok(if x == y { 0.0 } else { e + 1.0 })
            }
            SpaceKind::DirichletMetric => Ok(dirichlet_distance(self.quad(a)?, self.quad(b)?).to_f64()),
            _ => {
                let norm = self.norm().expect("normed kind");
                Ok(norm.value(&sub(&self.coords(a)?, &self.coords(b)?)))
            }
        }
    }

    /// Compares d(z, a) with d(z, b); exact for the Dirichlet metric.
    pub fn cmp_distances(&self, z: &Point, a: &Point, b: &Point) -> Result<Ordering> {
        if let SpaceKind::DirichletMetric = self.kind {
            let (z, a, b) = (self.quad(z)?, self.quad(a)?, self.quad(b)?);
            return Ok(dirichlet_distance(z, a).cmp(&dirichlet_distance(z, b)));
        }
        let (da, db) = (self.distance(z, a)?, self.distance(z, b)?);
        Ok(da.partial_cmp(&db).unwrap_or(Ordering::Equal))
    }

    /// A metric midpoint, when the space has one.
    pub fn midpoint(&self, a: &Point, b: &Point) -> Result<Option<Point>> {
        match &self.kind {
            SpaceKind::Discrete | SpaceKind::HybridNorm { .. } | SpaceKind::DirichletMetric => {
                self.check_point(a)?;
                self.check_point(b)?;
                Ok(if self.distance(a, b)? == 0.0 { Some(a.clone()) } else { None })
            }
            _ => {
                let (x, y) = (self.coords(a)?, self.coords(b)?);
                Ok(Some(Point::Vector(x.iter().zip(&y).map(|(p, q)| 0.5 * (p + q)).collect())))
            }
        }
    }

    /// Maps a point into the space: radial retraction onto the ball for
    /// `ClampedBall`, identity otherwise.
    pub fn project(&self, p: Point) -> Point {
        match (&self.kind, &p) {
            (SpaceKind::ClampedBall { radius, .. }, Point::Vector(v)) => {
                let n = self.norm().expect("normed").value(v);
                if n > *radius {
                    Point::Vector(v.iter().map(|x| x * radius / n).collect())
                } else {
                    p
                }
            }
            _ => p,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        if self.check_point(p).is_err() {
            return false;
        }
        match (&self.kind, p) {
            (SpaceKind::ClampedBall { radius, .. }, _) => {
                let v = self.coords(p).expect("checked");
                self.norm().expect("normed").value(&v) <= radius * (1.0 + 1e-12)
            }
            _ => true,
        }
    }
}

fn discrete_eq(space: &SpaceDescriptor, a: &Point, b: &Point) -> Result<bool> {
    match (a, b) {
        (Point::Quad(x), Point::Quad(y)) => Ok(x == y),
        (Point::Vector(x), Point::Vector(y)) => Ok(x == y),
        (Point::IndexSet(x), Point::IndexSet(y)) => {
            let (mut x, mut y) = (x.clone(), y.clone());
            x.sort_unstable();
            x.dedup();
            y.sort_unstable();
            y.dedup();
            Ok(x == y)
        }
        _ => Err(Error::Representation(format!(
            "cannot compare {a:?} and {b:?} in {:?}",
            space.kind
        ))),
    }
}

/// Exact Dirichlet-metric distance |a - b| + (1 + D(a - b)) δ(a, b).
pub fn dirichlet_distance(a: &QuadRational, b: &QuadRational) -> QuadRational {
    let diff = a.clone() - b.clone();
    if diff.is_zero() {
        return QuadRational::zero();
    }
    let jump = if diff.is_rational() { 2 } else { 1 };
    let one = num_rational::BigRational::one();
    diff.abs() + QuadRational::rational(one * num_rational::BigRational::from_integer(jump.into()))
}
