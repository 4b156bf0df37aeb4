//! The asymptotic functional I(y) = lim sup d(x_n, y), asymptotic radius and
//! center, and Chebyshev radii of finite sets.

mod minimax;
mod oracle;

use serde::{Deserialize, Serialize};

pub use minimax::{dual_lower_bound, enclosing_ball, subgradient_minimax, MinimaxSolution, SolverConfig};
pub use oracle::{SequenceOracle, TailWindow};

use crate::spaces::{Point, SpaceDescriptor};
use crate::{Error, Result};

pub const MIN_HORIZON: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub stability_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterResult {
    pub center: Point,
    pub radius: f64,
    pub optimality_gap: f64,
    pub stability_gap: f64,
    pub iterations: usize,
    pub window: TailWindow,
    pub method: String,
}

pub(crate) fn require_horizon(n: usize) -> Result<()> {
    if n < MIN_HORIZON {
        return Err(Error::InsufficientData { needed: MIN_HORIZON, got: n });
    }
    Ok(())
}

/// max over the tail of d(x_n, y), with the change against the secondary tail.
pub fn eval_i(oracle: &SequenceOracle, y: &Point, window: &TailWindow) -> Result<AsymptoticEstimate> {
    window.validate()?;
    let n = oracle.horizon();
    require_horizon(n)?;
    let space = oracle.space();
    let tail = window.tail(n);
    let secondary_start = window.secondary_tail(n).start;
    let mut value = 0.0f64;
    let mut late = 0.0f64;
    for k in tail {
        let d = space.distance(oracle.point(k), y)?;
        value = value.max(d);
        if k >= secondary_start {
            late = late.max(d);
        }
    }
    Ok(AsymptoticEstimate { value, stability_gap: (value - late).abs() })
}

/// Chebyshev radius and center of a finite set, with a certified gap.
pub fn chebyshev_radius(space: &SpaceDescriptor, points: &[Point]) -> Result<MinimaxSolution> {
    chebyshev_radius_with(space, points, &SolverConfig::default())
}

pub fn chebyshev_radius_with(space: &SpaceDescriptor, points: &[Point], cfg: &SolverConfig) -> Result<MinimaxSolution> {
    minimax::solve(space, &dedup_first(points), cfg)
}

/// Drops repeated points, keeping first occurrences in order.
fn dedup_first(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if !out.contains(p) {
            out.push(p.clone());
        }
    }
    out
}

pub fn asymptotic_center(oracle: &SequenceOracle, window: &TailWindow, cfg: &SolverConfig) -> Result<CenterResult> {
    window.validate()?;
    if !oracle.is_bounded() {
        return Err(Error::Domain("asymptotic center of an unbounded sequence".into()));
    }
    let n = oracle.horizon();
    require_horizon(n)?;
    let tail = &oracle.points()[window.tail(n)];
    let sol = chebyshev_radius_with(oracle.space(), tail, cfg)?;
    let est = eval_i(oracle, &sol.center, window)?;
    Ok(CenterResult {
        center: sol.center,
        radius: sol.radius,
        optimality_gap: sol.gap,
        stability_gap: est.stability_gap,
        iterations: sol.iterations,
        window: *window,
        method: sol.method,
    })
}

pub fn asymptotic_radius(oracle: &SequenceOracle, window: &TailWindow, cfg: &SolverConfig) -> Result<f64> {
    Ok(asymptotic_center(oracle, window, cfg)?.radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(x: Vec<f64>, n: usize) -> SequenceOracle {
        let dim = x.len();
        SequenceOracle::from_fn(SpaceDescriptor::euclidean(dim), n, true, |k| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            Point::Vector(x.iter().map(|v| s * v).collect())
        })
        .unwrap()
    }

    #[test]
    fn eval_i_on_alternating_signs() {
        let o = alternating(vec![1.0], 32);
        let w = TailWindow::default();
        let e = eval_i(&o, &Point::vector([0.0]), &w).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stability_gap, 0.0);
        assert_eq!(eval_i(&o, &Point::vector([0.5]), &w).unwrap().value, 1.5);
    }

    #[test]
    fn short_horizon_is_rejected() {
        let o = alternating(vec![1.0], 3);
        let err = eval_i(&o, &Point::vector([0.0]), &TailWindow::default()).unwrap_err();
        assert_eq!(err, Error::InsufficientData { needed: 4, got: 3 });
    }

    #[test]
    fn constant_sequence_center() {
        let c = Point::vector([0.3, -0.2]);
        let o = SequenceOracle::constant(SpaceDescriptor::euclidean(2), c.clone(), 16);
        let r = asymptotic_center(&o, &TailWindow::default(), &SolverConfig::default()).unwrap();
        assert_eq!(r.center, c);
        assert_eq!(r.radius, 0.0);
    }

    #[test]
    fn alternating_center_is_origin() {
        let o = alternating(vec![3.0, 4.0], 40);
        let r = asymptotic_center(&o, &TailWindow::default(), &SolverConfig::default()).unwrap();
        assert!((r.radius - 5.0).abs() < 1e-12);
        let c = r.center.as_vector().unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn unbounded_oracle_is_refused() {
        let o = SequenceOracle::from_fn(SpaceDescriptor::l1(8), 8, false, |k| {
            let mut v = vec![0.0; 8];
            v[k] = k as f64;
            Point::Vector(v)
        })
        .unwrap();
        assert!(matches!(
            asymptotic_center(&o, &TailWindow::default(), &SolverConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn discrete_pair_has_radius_one() {
        let s = SpaceDescriptor::discrete();
        let r = chebyshev_radius(&s, &[Point::vector([0.0]), Point::vector([1.0])]).unwrap();
        assert_eq!(r.radius, 1.0);
        assert_eq!(r.gap, 0.0);
    }
}
