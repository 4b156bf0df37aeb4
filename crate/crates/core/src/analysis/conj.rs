use serde::{Deserialize, Serialize};

use super::{dual_space, duality_map, weak_pairing_test, GridFunction, TestFamily, WeakVerdict};
use crate::asymptotic::{require_horizon, SequenceOracle, TailWindow};
use crate::convergence::{polar_test, ConvergenceVerdict};
use crate::spaces::{Point, ProbeSet};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConjConfig {
    pub window: TailWindow,
    pub family: TestFamily,
    pub weak_tol: f64,
    /// Required lower bound on the tail minimum of ‖x_n − x‖.
    pub eps0: f64,
}

impl Default for ConjConfig {
    fn default() -> Self {
        ConjConfig { window: TailWindow::default(), family: TestFamily::default(), weak_tol: 0.05, eps0: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjReport {
    pub tail_min_distance: f64,
    pub polar: ConvergenceVerdict,
    /// Weak test of (x_n − x)* against 0.
    pub weak_dual: WeakVerdict,
    pub agree: bool,
    pub incident: Option<String>,
}

/// Polar convergence of x_n to x next to weak convergence of (x_n − x)* to
/// zero. Disagreement is reported, never hidden.
pub fn conj_equivalence_check(oracle: &SequenceOracle, x: &Point, probes: &ProbeSet, cfg: &ConjConfig) -> Result<ConjReport> {
    cfg.window.validate()?;
    let n = oracle.horizon();
    require_horizon(n)?;
    let space = oracle.space();
    let dual = dual_space(space)?;
    let mut tail_min = f64::INFINITY;
    for k in cfg.window.tail(n) {
        tail_min = tail_min.min(space.distance(oracle.point(k), x)?);
    }
    if !(tail_min >= cfg.eps0) {
        return Err(Error::Refused(format!(
            "tail minimum of ‖x_n − x‖ is {tail_min:.3e}, below the required {:.3e}",
            cfg.eps0
        )));
    }
    let xc = space.coords(x)?;
    let mut duals = Vec::with_capacity(n);
    for p in oracle.points() {
        let d: Vec<f64> = space.coords(p)?.iter().zip(&xc).map(|(a, b)| a - b).collect();
        let u = GridFunction::from_point(space, &Point::Vector(d))?;
        duals.push(Point::Vector(match duality_map(&u) {
            Ok(v) => v.values,
            // the head of the sequence may touch x; only the tail is tested
            Err(_) => vec![0.0; xc.len()],
        }));
    }
    let dual_oracle = SequenceOracle::from_points(dual.clone(), duals, true)?;
    let zero = Point::Vector(vec![0.0; xc.len()]);
    let weak_dual = weak_pairing_test(&dual_oracle, &zero, &cfg.family, &cfg.window, cfg.weak_tol)?;
    let polar = polar_test(oracle, x, probes, &cfg.window)?;
    let agree = polar.is_certified() == weak_dual.is_certified();
    let incident = (!agree).then(|| {
        format!(
            "numerical-resolution incident: polar {:?} but weak-dual {:?} (worst pairing {:.3e}, tol {:.3e})",
            polar.status, weak_dual.status, weak_dual.worst, cfg.weak_tol
        )
    });
    Ok(ConjReport { tail_min_distance: tail_min, polar, weak_dual, agree, incident })
}
