//! Sequence fixtures for the ℓ¹, ℓ^∞ and nested-indicator examples.

use serde::Serialize;

use super::{strong_delta_test, ConvergenceVerdict};
use crate::asymptotic::{asymptotic_radius, SequenceOracle, SolverConfig, TailWindow};
use crate::spaces::{sample_probes, Point, ProbeConfig, ProbeSet, ProbeStrategy, SpaceDescriptor};
use crate::{Error, Result};

fn unit(dim: usize, k: usize, scale: f64) -> Point {
    let mut v = vec![0.0; dim];
    v[k] = scale;
    Point::Vector(v)
}

fn check_dims(dim: usize, horizon: usize) -> Result<()> {
    if horizon > dim {
        return Err(Error::Domain(format!("horizon {horizon} exceeds dimension {dim}")));
    }
    Ok(())
}

/// x_k = k·e_k under the 1-norm. Unbounded, so only polar tests apply.
pub fn l1_fixture(dim: usize, horizon: usize) -> Result<SequenceOracle> {
    check_dims(dim, horizon)?;
    SequenceOracle::from_fn(SpaceDescriptor::l1(dim), horizon, false, |k| unit(dim, k, k as f64))
}

/// x_k = e_k under the sup norm.
pub fn linf_fixture(dim: usize, horizon: usize) -> Result<SequenceOracle> {
    check_dims(dim, horizon)?;
    SequenceOracle::from_fn(SpaceDescriptor::sup(dim), horizon, true, |k| unit(dim, k, 1.0))
}

/// For β ≠ 0: the first index n₀ with β_{n₀} ≠ 0 and γ = β with that
/// coordinate zeroed, which is never farther than β from e_k for k > n₀.
pub fn linf_gamma_probe(beta: &[f64]) -> Result<(usize, Point)> {
    let n0 = beta
        .iter()
        .position(|&b| b != 0.0)
        .ok_or_else(|| Error::Domain("β must be nonzero".into()))?;
    let mut gamma = beta.to_vec();
    gamma[n0] = 0.0;
    Ok((n0, Point::Vector(gamma)))
}

#[derive(Clone, Debug, Serialize)]
pub struct NonuniqueDemo {
    pub grid: usize,
    pub depth: usize,
    #[serde(skip)]
    pub oracle: SequenceOracle,
    pub window: TailWindow,
    pub candidates: Vec<Point>,
    pub candidate_separation: f64,
    /// Smallest ‖x_n − x_m‖_∞ over n ≠ m.
    pub min_pair_distance: f64,
    /// max_n d(x_n, x) over the tail, per candidate.
    pub candidate_radii: Vec<f64>,
    /// Solver estimate; needs at least four terms.
    pub asymptotic_radius: Option<f64>,
    /// Strong-Δ verdicts at tolerance 0; needs at least four terms.
    pub verdicts: Option<Vec<ConvergenceVerdict>>,
}

pub const INDICATOR_WINDOW: TailWindow = TailWindow { start: 0.2, secondary: 0.6 };

/// Nested halving sets A_k = [0, G/2^k) and x_n = 1_{A_{n+1}} − 1_{A_n \ A_{n+1}}
/// for n < m, under the sup norm on G cells.
pub fn nonunique_strong_delta_demo(grid: usize, depth: usize) -> Result<NonuniqueDemo> {
    if depth == 0 || depth >= usize::BITS as usize || (1usize << depth) > grid {
        return Err(Error::Domain(format!("depth {depth} needs at least 2^{depth} grid cells, got {grid}")));
    }
    let a = |k: usize| grid >> k;
    let space = SpaceDescriptor::sup(grid);
    let oracle = SequenceOracle::from_fn(space.clone(), depth, true, |n| {
        Point::Vector(
            (0..grid)
                .map(|i| if i < a(n + 1) { 1.0 } else if i < a(n) { -1.0 } else { 0.0 })
                .collect(),
        )
    })?;
    let window = INDICATOR_WINDOW;
    let n_bar = window.tail(depth).start;
    let zero = Point::Vector(vec![0.0; grid]);
    let complement = Point::Vector((0..grid).map(|i| if i < a(n_bar) { 0.0 } else { 1.0 }).collect());
    let candidates = vec![zero, complement];

    let mut min_pair = f64::INFINITY;
    for i in 0..depth {
        for j in i + 1..depth {
            min_pair = min_pair.min(space.distance(oracle.point(i), oracle.point(j))?);
        }
    }
    let tail = window.tail(depth);
    let mut radii = Vec::new();
    for c in &candidates {
        let mut r = 0.0f64;
        for k in tail.clone() {
            r = r.max(space.distance(oracle.point(k), c)?);
        }
        radii.push(r);
    }
    let (asymptotic, verdicts) = if depth >= 4 {
        let r = asymptotic_radius(&oracle, &window, &SolverConfig::default())?;
        let mut vs = Vec::new();
        for c in &candidates {
            let probes = indicator_probes(grid, c, &candidates)?;
            vs.push(strong_delta_test(&oracle, c, &probes, &window, 0.0)?);
        }
        (Some(r), Some(vs))
    } else {
        (None, None)
    };
    Ok(NonuniqueDemo {
        grid,
        depth,
        oracle,
        window,
        candidate_separation: space.distance(&candidates[0], &candidates[1])?,
        candidates,
        min_pair_distance: min_pair,
        candidate_radii: radii,
        asymptotic_radius: asymptotic,
        verdicts,
    })
}

/// ±½ coordinate bumps around `center` plus the given extra points other
/// than the center itself.
pub fn indicator_probes(grid: usize, center: &Point, extra: &[Point]) -> Result<ProbeSet> {
    let space = SpaceDescriptor::sup(grid);
    let cfg = ProbeConfig::new(ProbeStrategy::CoordinateBump, 2 * grid, 0, 0.5);
    let bumps = sample_probes(&space, center, &cfg, None)?;
    let others: Vec<Point> = extra.iter().filter(|p| *p != center).cloned().collect();
    Ok(ProbeSet::union(vec![bumps, ProbeSet::new("indicator-candidates", others)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_zeroes_first_nonzero_coordinate() {
        let (n0, g) = linf_gamma_probe(&[0.0, 0.0, 0.3, -0.1]).unwrap();
        assert_eq!(n0, 2);
        assert_eq!(g, Point::vector([0.0, 0.0, 0.0, -0.1]));
        assert!(linf_gamma_probe(&[0.0; 3]).is_err());
    }

    #[test]
    fn indicator_terms_are_two_apart() {
        let d = nonunique_strong_delta_demo(64, 5).unwrap();
        assert_eq!(d.min_pair_distance, 2.0);
        assert_eq!(d.candidate_radii, vec![1.0, 1.0]);
        assert!(d.candidate_separation >= 1.0);
    }

    #[test]
    fn too_deep_for_grid() {
        assert!(matches!(nonunique_strong_delta_demo(16, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn single_step_still_measures_radius() {
        let d = nonunique_strong_delta_demo(8, 1).unwrap();
        assert_eq!(d.candidate_radii, vec![1.0, 1.0]);
        assert!(d.verdicts.is_none());
    }
}
