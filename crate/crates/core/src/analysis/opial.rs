use serde::{Deserialize, Serialize};

use super::{circle_grid, oscillating_sequence, weak_pairing_test, weighted_norm, Oscillation, TestFamily, WeakVerdict};
use crate::asymptotic::{require_horizon, SequenceOracle, TailWindow};
use crate::numeric::compensated_sum;
use crate::spaces::{Norm, Point};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpialConfig {
    pub a: f64,
    pub b: f64,
    /// Weight of the cos(2nt) term. With κ = 0 the oscillation is
    /// symmetric about zero and the constant center coincides with a.
    pub kappa: f64,
    pub first_frequency: usize,
    pub window: TailWindow,
    pub family: TestFamily,
    pub weak_tol: f64,
    pub refine_steps: usize,
}

impl Default for OpialConfig {
    fn default() -> Self {
        OpialConfig {
            a: 1.0,
            b: 1.0,
            kappa: 0.5,
            first_frequency: 1,
            window: TailWindow::default(),
            family: TestFamily::default(),
            weak_tol: 0.05,
            refine_steps: 300,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpialDemo {
    pub p: f64,
    pub grid: usize,
    pub horizon: usize,
    /// p = 2 is the Hilbert control case, where the gap should vanish.
    pub control: bool,
    #[serde(skip)]
    pub oracle: SequenceOracle,
    pub weak_limit: f64,
    pub weak: WeakVerdict,
    /// Best constant c for max over the tail of ‖u_n − c‖_p.
    pub constant_center: f64,
    pub constant_radius: f64,
    /// ‖a − c‖_p for the constant center.
    pub gap: f64,
    pub refined_radius: f64,
    /// ‖a − y‖_p for the refined (non-constant) center y.
    pub refined_gap: f64,
}

/// Tail functional over constants and a subgradient of it.
fn constant_objective(tail: &[Vec<f64>], weights: &[f64], p: f64, c: f64) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for u in tail {
        let r: Vec<f64> = u.iter().map(|v| v - c).collect();
        let n = weighted_norm(&r, weights, p);
        if n > best.0 {
            let slope = if n == 0.0 {
                0.0
            } else {
                -compensated_sum(weights.iter().zip(&r).map(|(w, x)| w * (x.abs() / n).powf(p - 1.0) * x.signum()))
            };
            best = (n, slope);
        }
    }
    best
}

/// u_n = a + b(sin(nt) + κ cos(2nt)) on a uniform grid of (0, 2π). Its weak
/// limit is the constant a; the asymptotic center among constants is found
/// by bisection on the sign of a subgradient, then improved by subgradient
/// steps over general grid functions.
pub fn opial_lp_divergence_demo(p: f64, grid: usize, horizon: usize, cfg: &OpialConfig) -> Result<OpialDemo> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("exponent must satisfy 1 < p < ∞, got {p}")));
    }
    require_horizon(horizon)?;
    if grid < 4 {
        return Err(Error::Domain("grid needs at least 4 nodes".into()));
    }
    let space = circle_grid(grid, p)?;
    let weights = vec![std::f64::consts::TAU / grid as f64; grid];
    let base = vec![cfg.a; grid];
    let osc = Oscillation { amplitude: cfg.b, kappa: cfg.kappa, first_frequency: cfg.first_frequency, horizon };
    let oracle = oscillating_sequence(&space, &base, &osc)?;
    let weak = weak_pairing_test(&oracle, &Point::Vector(base.clone()), &cfg.family, &cfg.window, cfg.weak_tol)?;

    let tail: Vec<Vec<f64>> = oracle.points()[cfg.window.tail(horizon)]
        .iter()
        .map(|x| space.coords(x))
        .collect::<Result<_>>()?;
    let (mut lo, mut hi) = tail.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if constant_objective(&tail, &weights, p, mid).1 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let constant_radius = constant_objective(&tail, &weights, p, c).0;
    let gap = weighted_norm(&vec![cfg.a - c; grid], &weights, p);

    let norm = Norm::WeightedLp { weights: weights.clone(), p };
    let objective = |y: &[f64]| {
        tail.iter().fold(0.0f64, |m, u| m.max(norm.value(&u.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())))
    };
    let mut y = vec![c; grid];
    let mut best = (constant_radius, y.clone());
    for k in 1..=cfg.refine_steps {
        let vals: Vec<f64> = tail.iter().map(|u| norm.value(&u.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>())).collect();
        let f = vals.iter().fold(0.0f64, |m, v| m.max(*v));
        if f < best.0 {
            best = (f, y.clone());
        }
        let mut g = vec![0.0; grid];
        for (u, v) in tail.iter().zip(&vals) {
            if *v >= f * (1.0 - 1e-12) {
                let r: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a - b).collect();
                for (gi, si) in g.iter_mut().zip(norm.subgradient(&r)) {
                    *gi -= si;
                }
            }
        }
        let gl = crate::numeric::norm2(&g);
        if gl == 0.0 {
            break;
        }
        let step = 0.05 * constant_radius / (k as f64).sqrt() / gl;
        for (yi, gi) in y.iter_mut().zip(&g) {
            *yi -= step * gi;
        }
    }
    let f = objective(&y);
    if f < best.0 {
        best = (f, y);
    }
    let refined_gap = weighted_norm(&best.1.iter().map(|v| cfg.a - v).collect::<Vec<_>>(), &weights, p);
    Ok(OpialDemo {
        p,
        grid,
        horizon,
        control: p == 2.0,
        oracle,
        weak_limit: cfg.a,
        weak,
        constant_center: c,
        constant_radius,
        gap,
        refined_radius: best.0,
        refined_gap,
    })
}
