use serde::{Deserialize, Serialize};

use super::{lp_structure, weak_pairing_test, TestFamily, WeakVerdict};
use crate::asymptotic::{require_horizon, SequenceOracle, TailWindow};
use crate::convergence::{polar_test, ConvergenceVerdict};
use crate::numeric::compensated_sum;
use crate::spaces::{Point, ProbeSet};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlConfig {
    pub window: TailWindow,
    pub family: TestFamily,
    pub weak_tol: f64,
    pub tol: f64,
}

impl Default for BlConfig {
    fn default() -> Self {
        BlConfig { window: TailWindow::default(), family: TestFamily::default(), weak_tol: 0.05, tol: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlMode {
    /// p ≥ 3: tail-min deficit ≥ −tol is asserted.
    Asserted,
    /// p = 2: the deficit is 2⟨u, u_n − u⟩ and must vanish within tol.
    Identity,
    /// Other p: reported only.
    Exploratory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlReport {
    pub p: f64,
    pub mode: BlMode,
    /// D_n for n in the tail, in order.
    pub deficits: Vec<f64>,
    pub tail_start: usize,
    pub tail_min: f64,
    pub tail_max_abs: f64,
    pub pass: bool,
    pub strictly_positive: bool,
    pub weak: WeakVerdict,
    pub polar: ConvergenceVerdict,
}

impl BlReport {
    /// `n,deficit` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,deficit\n");
        for (i, d) in self.deficits.iter().enumerate() {
            s.push_str(&format!("{},{d:?}\n", self.tail_start + i));
        }
        s
    }
}

fn integral_p(weights: &[f64], v: &[f64], p: f64) -> f64 {
    compensated_sum(weights.iter().zip(v).map(|(w, x)| w * x.abs().powf(p)))
}

/// D_n = Σμ|u_n|^p − Σμ|u|^p − Σμ|u_n − u|^p over the tail, after the weak
/// and polar hypotheses are certified.
pub fn brezis_lieb_check(oracle: &SequenceOracle, u: &Point, probes: &ProbeSet, cfg: &BlConfig) -> Result<BlReport> {
    cfg.window.validate()?;
    let n = oracle.horizon();
    require_horizon(n)?;
    let space = oracle.space();
    let (weights, p) = lp_structure(space)?;
    let weak = weak_pairing_test(oracle, u, &cfg.family, &cfg.window, cfg.weak_tol)?;
    let polar = polar_test(oracle, u, probes, &cfg.window)?;
    if !weak.is_certified() || !polar.is_certified() {
        return Err(Error::Refused(format!(
            "hypotheses not certified: weak {:?}, polar {:?}",
            weak.status, polar.status
        )));
    }
    let uc = space.coords(u)?;
    let base = integral_p(&weights, &uc, p);
    let tail = cfg.window.tail(n);
    let mut deficits = Vec::with_capacity(tail.len());
    for k in tail.clone() {
        let x = space.coords(oracle.point(k))?;
        let d: Vec<f64> = x.iter().zip(&uc).map(|(a, b)| a - b).collect();
        deficits.push(integral_p(&weights, &x, p) - base - integral_p(&weights, &d, p));
    }
    let tail_min = deficits.iter().fold(f64::INFINITY, |m, d| m.min(*d));
    let tail_max_abs = deficits.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let mode = if p >= 3.0 {
        BlMode::Asserted
    } else if p == 2.0 {
        BlMode::Identity
    } else {
        BlMode::Exploratory
    };
    let pass = match mode {
        BlMode::Asserted => tail_min >= -cfg.tol,
        BlMode::Identity => tail_max_abs <= cfg.tol,
        BlMode::Exploratory => true,
    };
    Ok(BlReport {
        p,
        mode,
        deficits,
        tail_start: tail.start,
        tail_min,
        tail_max_abs,
        pass,
        strictly_positive: tail_min > cfg.tol,
        weak,
        polar,
    })
}
