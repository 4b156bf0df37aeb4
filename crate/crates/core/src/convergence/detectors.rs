use std::cmp::Ordering;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConvergenceVerdict, Mode, ProbeRow, Status, Witness};
use crate::asymptotic::{require_horizon, SequenceOracle, TailWindow};
use crate::spaces::{Point, ProbeSet, SpaceDescriptor};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeltaConfig {
    /// Number of seeded random subsequences, on top of suffixes, residue
    /// classes and the per-probe violation sets.
    pub subsamples: usize,
    pub seed: u64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig { subsamples: 8, seed: 0 }
    }
}

struct Prepared {
    tail: Range<usize>,
    quarter: Range<usize>,
    dx: Vec<f64>,
}

fn prepare(oracle: &SequenceOracle, x: &Point, probes: &ProbeSet, window: &TailWindow) -> Result<Prepared> {
    window.validate()?;
    if probes.is_empty() {
        return Err(Error::Configuration("probe family is empty".into()));
    }
    let n = oracle.horizon();
    require_horizon(n)?;
    oracle.space().check_point(x)?;
    let dx = distances(oracle, x)?;
    Ok(Prepared { tail: window.tail(n), quarter: window.final_quarter(n), dx })
}

fn distances(oracle: &SequenceOracle, y: &Point) -> Result<Vec<f64>> {
    oracle.points().iter().map(|p| oracle.space().distance(p, y)).collect()
}

fn max_over(d: &[f64], idx: &[usize]) -> f64 {
    idx.iter().fold(f64::NEG_INFINITY, |m, &k| m.max(d[k]))
}

/// Subsequences of the tail tested for every probe.
fn shared_subsequences(tail: &Range<usize>, cfg: &DeltaConfig) -> Vec<Vec<usize>> {
    let len = tail.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let step = (len / 8).max(1);
    let mut s = tail.start;
    while s + 2 <= tail.end {
        out.push((s..tail.end).collect());
        s += step;
    }
    for m in [2usize, 3] {
        for r in 0..m {
            out.push(tail.clone().filter(|k| k % m == r).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.subsamples {
        out.push(tail.clone().filter(|_| rng.random::<bool>()).collect());
    }
    out.retain(|s| s.len() >= 2);
    out
}

/// Δ test: for each probe y and tested subsequence S of the tail,
/// max_S d(x_n,x) − max_S d(x_n,y) must stay within `tol`. A violation that
/// survives restriction to the final quarter falsifies.
pub fn delta_test(
    oracle: &SequenceOracle,
    x: &Point,
    probes: &ProbeSet,
    window: &TailWindow,
    tol: f64,
    cfg: &DeltaConfig,
) -> Result<ConvergenceVerdict> {
    check_tol(tol)?;
    let prep = prepare(oracle, x, probes, window)?;
    let shared = shared_subsequences(&prep.tail, cfg);
    let mut rows = Vec::with_capacity(probes.len());
    let mut falsifier: Option<Witness> = None;
    let mut transient: Option<Witness> = None;
    for (j, y) in probes.points.iter().enumerate() {
        let dy = distances(oracle, y)?;
        let violating: Vec<usize> = prep.tail.clone().filter(|&k| prep.dx[k] > dy[k] + tol).collect();
        let mut worst = f64::NEG_INFINITY;
        let candidates = shared.iter().chain(std::iter::once(&violating)).filter(|s| s.len() >= 2);
        for s in candidates {
            let v = max_over(&prep.dx, s) - max_over(&dy, s);
            worst = worst.max(v);
            if v <= tol {
                continue;
            }
            let late: Vec<usize> = s.iter().copied().filter(|k| prep.quarter.contains(k)).collect();
            let witness = |idx: Vec<usize>| Witness {
                mode: Mode::Delta,
                probe_index: Some(j),
                probe: Some(y.clone()),
                candidate_distance: max_over(&prep.dx, &idx),
                probe_distance: max_over(&dy, &idx),
                candidate_indices: idx.clone(),
                probe_indices: idx,
                tolerance: tol,
            };
            if !late.is_empty() && max_over(&prep.dx, &late) - max_over(&dy, &late) > tol {
                falsifier.get_or_insert_with(|| witness(late));
            } else {
                transient.get_or_insert_with(|| witness(s.clone()));
            }
        }
        rows.push(ProbeRow { probe_index: j, m: None, gap: worst });
    }
    let margin = rows.iter().fold(f64::INFINITY, |m, r| m.min(-r.gap));
    let status = if falsifier.is_some() {
        Status::Falsified
    } else if transient.is_some() {
        Status::Inconclusive
    } else {
        Status::Certified
    };
    Ok(ConvergenceVerdict {
        mode: Mode::Delta,
        status,
        tolerance: tol,
        margin,
        witness: falsifier.or(transient),
        probes: rows,
        probe_family: probes.label.clone(),
        notes: vec![format!("{} shared tail subsequences plus one violation set per probe", shared.len())],
    })
}

/// Strong-Δ test: d(x_n,x) must be nearly constant on the tail (existence of
/// the limit) and no probe may come closer than that limit.
pub fn strong_delta_test(
    oracle: &SequenceOracle,
    x: &Point,
    probes: &ProbeSet,
    window: &TailWindow,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    check_tol(tol)?;
    let prep = prepare(oracle, x, probes, window)?;
    let argmax = |r: &Range<usize>, d: &[f64]| r.clone().fold(r.start, |b, k| if d[k] > d[b] { k } else { b });
    let argmin = |r: &Range<usize>, d: &[f64]| r.clone().fold(r.start, |b, k| if d[k] < d[b] { k } else { b });
    let mut falsifier: Option<Witness> = None;
    let mut transient: Option<Witness> = None;
    let mut record = |late: bool, w: Witness| {
        if late {
            falsifier.get_or_insert(w);
        } else {
            transient.get_or_insert(w);
        }
    };
    let tail_max = argmax(&prep.tail, &prep.dx);
    let osc = prep.dx[tail_max] - prep.dx[argmin(&prep.tail, &prep.dx)];
    if osc > tol {
        let (hi, lo) = (argmax(&prep.quarter, &prep.dx), argmin(&prep.quarter, &prep.dx));
        let late = prep.dx[hi] - prep.dx[lo] > tol;
        let (hi, lo) = if late { (hi, lo) } else { (tail_max, argmin(&prep.tail, &prep.dx)) };
        record(
            late,
            Witness {
                mode: Mode::StrongDelta,
                probe_index: None,
                probe: None,
                candidate_indices: vec![hi],
                probe_indices: vec![lo],
                candidate_distance: prep.dx[hi],
                probe_distance: prep.dx[lo],
                tolerance: tol,
            },
        );
    }
    let mut rows = Vec::with_capacity(probes.len());
    for (j, y) in probes.points.iter().enumerate() {
        let dy = distances(oracle, y)?;
        let lo = argmin(&prep.tail, &dy);
        let excess = prep.dx[tail_max] - dy[lo];
        rows.push(ProbeRow { probe_index: j, m: None, gap: excess });
        if excess > tol {
            let (qh, ql) = (argmax(&prep.quarter, &prep.dx), argmin(&prep.quarter, &dy));
            let late = prep.dx[qh] - dy[ql] > tol;
            let (hi, lo) = if late { (qh, ql) } else { (tail_max, lo) };
            record(
                late,
                Witness {
                    mode: Mode::StrongDelta,
                    probe_index: Some(j),
                    probe: Some(y.clone()),
                    candidate_indices: vec![hi],
                    probe_indices: vec![lo],
                    candidate_distance: prep.dx[hi],
                    probe_distance: dy[lo],
                    tolerance: tol,
                },
            );
        }
    }
    let margin = rows.iter().fold(f64::INFINITY, |m, r| m.min(-r.gap));
    let status = if falsifier.is_some() {
        Status::Falsified
    } else if transient.is_some() {
        Status::Inconclusive
    } else {
        Status::Certified
    };
    Ok(ConvergenceVerdict {
        mode: Mode::StrongDelta,
        status,
        tolerance: tol,
        margin,
        witness: falsifier.or(transient),
        probes: rows,
        probe_family: probes.label.clone(),
        notes: vec![
            format!("existence of lim d(x_n,x) read as tail oscillation {osc:.3e} <= tol"),
        ],
    })
}

/// Polar test. M(y) is the least index after which d(x_n,x) < d(x_n,y)
/// holds strictly through the horizon (exact comparison where the space
/// supports it). Certified when every M(y) lies at or before the tail start.
pub fn polar_test(
    oracle: &SequenceOracle,
    x: &Point,
    probes: &ProbeSet,
    window: &TailWindow,
) -> Result<ConvergenceVerdict> {
    let prep = prepare(oracle, x, probes, window)?;
    let space = oracle.space();
    let n = oracle.horizon();
    let mut rows = Vec::with_capacity(probes.len());
    let mut falsifier: Option<Witness> = None;
    let mut transient: Option<Witness> = None;
    let mut all_early = true;
    for (j, y) in probes.points.iter().enumerate() {
        if space.distance(x, y)? == 0.0 {
            return Err(Error::Configuration(format!("probe {j} coincides with the candidate")));
        }
        let dy = distances(oracle, y)?;
        let mut last_bad: Option<usize> = None;
        for k in (0..n).rev() {
            if space.cmp_distances(oracle.point(k), x, y)? != Ordering::Less {
                last_bad = Some(k);
                break;
            }
        }
        let m = match last_bad {
            None => Some(0),
            Some(k) if k + 1 < n => Some(k + 1),
            Some(_) => None,
        };
        let gap = match m {
            Some(m) => (m..n).fold(f64::INFINITY, |g, k| g.min(dy[k] - prep.dx[k])),
            None => f64::NEG_INFINITY,
        };
        if m.is_none_or(|m| m > prep.tail.start) {
            all_early = false;
        }
        if let Some(k) = last_bad {
            let w = Witness {
                mode: Mode::Polar,
                probe_index: Some(j),
                probe: Some(y.clone()),
                candidate_indices: vec![k],
                probe_indices: vec![k],
                candidate_distance: prep.dx[k],
                probe_distance: dy[k],
                tolerance: 0.0,
            };
            if prep.quarter.contains(&k) {
                falsifier.get_or_insert(w);
            } else if k >= prep.tail.start {
                transient.get_or_insert(w);
            }
        }
        rows.push(ProbeRow { probe_index: j, m, gap });
    }
    let margin = rows.iter().fold(f64::INFINITY, |g, r| g.min(r.gap));
    let status = if falsifier.is_some() {
        Status::Falsified
    } else if all_early {
        Status::Certified
    } else {
        Status::Inconclusive
    };
    Ok(ConvergenceVerdict {
        mode: Mode::Polar,
        status,
        tolerance: 0.0,
        margin,
        witness: falsifier.or(transient),
        probes: rows,
        probe_family: probes.label.clone(),
        notes: Vec::new(),
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::Configuration(format!("tolerance must be finite and nonnegative, got {tol}")));
    }
    Ok(())
}

/// z ∈ N_Y(x): strictly closer to x than to every member of Y.
pub fn polar_nbhd_member(space: &SpaceDescriptor, x: &Point, ys: &[Point], z: &Point) -> Result<bool> {
    for y in ys {
        if space.distance(x, y)? == 0.0 {
            return Err(Error::Domain("the center of a polar neighborhood must not belong to Y".into()));
        }
    }
    for y in ys {
        if space.cmp_distances(z, x, y)? != Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}
