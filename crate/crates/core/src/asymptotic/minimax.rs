//! Solvers for min_y max_i d(y, p_i).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::{compensated_sum, dot, sub};
use crate::spaces::{sample_probes, Norm, Point, ProbeConfig, ProbeStrategy, SpaceDescriptor, SpaceKind};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Subgradient iterations per phase; step c/√k restarts with c / 10 each phase.
    pub iterations: usize,
    pub phases: usize,
    /// Probe count per refinement round of the generic candidate search.
    pub candidates: usize,
    /// Start the first restart at the middle of the bounding box. When off,
    /// every restart starts at a seeded random point of the box.
    pub midpoint_start: bool,
    /// Allow closed-form solutions where one exists (the sup norm).
    pub closed_form: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 5,
            seed: 0,
            iterations: 1500,
            phases: 5,
            candidates: 64,
            midpoint_start: true,
            closed_form: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxSolution {
    pub center: Point,
    pub radius: f64,
    /// Radius minus a certified lower bound on the optimum.
    pub gap: f64,
    pub iterations: usize,
    pub method: String,
}

pub fn solve(space: &SpaceDescriptor, points: &[Point], cfg: &SolverConfig) -> Result<MinimaxSolution> {
    if points.is_empty() {
        return Err(Error::Domain("Chebyshev radius of an empty set".into()));
    }
    for p in points {
        space.check_point(p)?;
    }
    match (&space.kind, space.norm()) {
        (_, Some(Norm::L2)) => {
            let vs: Vec<Vec<f64>> = points.iter().map(|p| space.coords(p)).collect::<Result<_>>()?;
            Ok(enclosing_ball(&vs, cfg.seed))
        }
        (_, Some(Norm::Sup)) if cfg.closed_form && space.ball_radius().is_none() => {
            let vs: Vec<Vec<f64>> = points.iter().map(|p| space.coords(p)).collect::<Result<_>>()?;
            Ok(sup_norm_center(&vs))
        }
        (_, Some(norm)) => {
            let vs: Vec<Vec<f64>> = points.iter().map(|p| space.coords(p)).collect::<Result<_>>()?;
            Ok(subgradient_minimax(&vs, &norm, space.ball_radius(), cfg))
        }
        (SpaceKind::Discrete, None) => discrete(space, points),
        (_, None) => candidate_search(space, points, cfg),
    }
}

fn max_distance(space: &SpaceDescriptor, y: &Point, points: &[Point]) -> Result<f64> {
    let mut m = 0.0f64;
    for p in points {
        m = m.max(space.distance(y, p)?);
    }
    Ok(m)
}

fn discrete(space: &SpaceDescriptor, points: &[Point]) -> Result<MinimaxSolution> {
    let radius = max_distance(space, &points[0], points)?;
    Ok(MinimaxSolution { center: points[0].clone(), radius, gap: 0.0, iterations: 1, method: "discrete-exact".into() })
}

/// Half the diameter bounds the Chebyshev radius from below in any metric.
fn half_diameter(space: &SpaceDescriptor, points: &[Point]) -> Result<f64> {
    let mut d = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(space.distance(a, b)?);
        }
    }
    Ok(d / 2.0)
}

/// Candidates are the points, their midpoints when they exist, and two
/// rounds of probes around the incumbent. Ties go to the earliest candidate.
fn candidate_search(space: &SpaceDescriptor, points: &[Point], cfg: &SolverConfig) -> Result<MinimaxSolution> {
    let mut candidates: Vec<Point> = points.to_vec();
    if space.has_menger_midpoints {
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if let Some(m) = space.midpoint(a, b)? {
                    candidates.push(m);
                }
            }
        }
    }
    let mut evaluated = 0usize;
    let mut best: Option<(f64, Point)> = None;
    let consider = |cands: &[Point], best: &mut Option<(f64, Point)>, evaluated: &mut usize| -> Result<()> {
        for c in cands {
            let r = max_distance(space, c, points)?;
            *evaluated += 1;
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                *best = Some((r, c.clone()));
            }
        }
        Ok(())
    };
    consider(&candidates, &mut best, &mut evaluated)?;
    for round in 0..2u64 {
        let (r, c) = best.clone().expect("nonempty");
        if r == 0.0 {
            break;
        }
        let probe_cfg = ProbeConfig::new(
            ProbeStrategy::BallUniform,
            cfg.candidates.max(1),
            cfg.seed.wrapping_add(round + 1),
            r / 2f64.powi(round as i32 + 1),
        );
        let probes = sample_probes(space, &c, &probe_cfg, None)?;
        consider(&probes.points, &mut best, &mut evaluated)?;
    }
    let (radius, center) = best.expect("nonempty");
    let lower = half_diameter(space, points)?;
    Ok(MinimaxSolution {
        center,
        radius,
        gap: (radius - lower).max(0.0),
        iterations: evaluated,
        method: "candidate-search".into(),
    })
}

/// Under the sup norm the middle of the coordinate bounding box is a
/// Chebyshev center and the radius is half the largest coordinate range.
pub fn sup_norm_center(points: &[Vec<f64>]) -> MinimaxSolution {
    let dim = points[0].len();
    let mut center = vec![0.0; dim];
    let mut radius = 0.0f64;
    for (k, c) in center.iter_mut().enumerate() {
        let lo = points.iter().fold(f64::INFINITY, |m, p| m.min(p[k]));
        let hi = points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[k]));
        *c = 0.5 * (lo + hi);
        radius = radius.max(0.5 * (hi - lo));
    }
    // the half-range is a lower bound too; rounding of the midpoint aside,
    // the two agree
    let attained = points.iter().fold(0.0f64, |m, p| m.max(Norm::Sup.value(&sub(p, &center))));
    MinimaxSolution {
        center: Point::Vector(center),
        radius: attained,
        gap: (attained - radius).max(0.0),
        iterations: 1,
        method: "sup-norm-box".into(),
    }
}

/// Smallest enclosing Euclidean ball. Away-step Frank–Wolfe on the dual
/// max_λ Σλ|p_i|² − |Σλp_i|² identifies the support, which is then solved
/// exactly for the equidistant point of its affine hull.
pub fn enclosing_ball(points: &[Vec<f64>], seed: u64) -> MinimaxSolution {
    let n = points.len();
    let start = (seed as usize) % n;
    let mut lambda = vec![0.0; n];
    lambda[start] = 1.0;
    let mut center = points[start].clone();
    let mut iterations = 0usize;
    let dist2 = |c: &[f64], p: &[f64]| -> f64 { compensated_sum(c.iter().zip(p).map(|(a, b)| (a - b) * (a - b))) };
    for it in 0..200_000usize {
        iterations += 1;
        if it % 32 == 31 && try_polish(points, &center, &lambda).is_some() {
            break;
        }
        let d2: Vec<f64> = points.iter().map(|p| dist2(&center, p)).collect();
        let r2 = compensated_sum(lambda.iter().zip(&d2).map(|(l, d)| l * d));
        let (far, far_d2) = d2.iter().enumerate().fold((0, f64::MIN), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        let (near, near_d2) = d2
            .iter()
            .enumerate()
            .filter(|(i, _)| lambda[*i] > 0.0)
            .fold((usize::MAX, f64::MAX), |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc });
        let fw_gap = far_d2 - r2;
        let away_gap = r2 - near_d2;
        if fw_gap.max(away_gap) <= 1e-15 * far_d2.max(1e-300) {
            break;
        }
        if fw_gap >= away_gap {
            let gamma = (fw_gap / (2.0 * far_d2)).clamp(0.0, 1.0);
            for l in lambda.iter_mut() {
                *l *= 1.0 - gamma;
            }
            lambda[far] += gamma;
            center = center.iter().zip(&points[far]).map(|(c, p)| c + gamma * (p - c)).collect();
        } else {
            let lk = lambda[near];
            let gmax = if lk >= 1.0 { 0.0 } else { lk / (1.0 - lk) };
            let gamma = if near_d2 > 0.0 { (away_gap / (2.0 * near_d2)).clamp(0.0, gmax) } else { gmax };
            if gamma == 0.0 {
                break;
            }
            for l in lambda.iter_mut() {
                *l *= 1.0 + gamma;
            }
            lambda[near] -= gamma;
            if gamma == gmax {
                lambda[near] = 0.0;
            }
            center = center.iter().zip(&points[near]).map(|(c, p)| c + gamma * (c - p)).collect();
        }
    }
    let fw = certify_ball(points, &center, &lambda);
    let polished = try_polish(points, &center, &lambda);
    let (center, radius, lower) = match polished {
        Some(p) if p.1 <= fw.1 => p,
        _ => fw,
    };
    MinimaxSolution {
        center: Point::Vector(center),
        radius,
        gap: (radius - lower).max(0.0),
        iterations,
        method: "enclosing-ball".into(),
    }
}

/// Solves exactly on two guesses of the support: the points carrying
/// weight, and the weighted points that are nearly farthest. Returns the
/// first certified (center, radius, lower bound).
fn try_polish(points: &[Vec<f64>], center: &[f64], lambda: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let weighted: Vec<usize> = (0..points.len()).filter(|&i| lambda[i] > 1e-14).collect();
    let d2: Vec<f64> = points.iter().map(|p| compensated_sum(center.iter().zip(p).map(|(a, b)| (a - b) * (a - b)))).collect();
    let far = d2.iter().fold(0.0f64, |m, d| m.max(*d));
    let near_far: Vec<usize> = weighted.iter().copied().filter(|&i| d2[i] >= far * (1.0 - 1e-6)).collect();
    let mut by_weight = weighted.clone();
    by_weight.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]).then(a.cmp(&b)));
    let dim = center.len();
    let mut guesses: Vec<Vec<usize>> = (2..=(dim + 1).min(by_weight.len()).min(17))
        .map(|k| {
            let mut g = by_weight[..k].to_vec();
            g.sort_unstable();
            g
        })
        .collect();
    guesses.push(near_far);
    guesses.push(weighted);
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for support in guesses {
        if let Some((c, l)) = polish_support(points, &support) {
            let cert = certify_ball(points, &c, &l);
            if cert.1 - cert.2 <= 1e-12 * (1.0 + cert.1) && best.as_ref().is_none_or(|b| cert.1 < b.1) {
                best = Some(cert);
            }
        }
    }
    best
}

/// (center, max distance, dual lower bound sqrt(Σλ|p_i − c|²)).
fn certify_ball(points: &[Vec<f64>], center: &[f64], lambda: &[f64]) -> (Vec<f64>, f64, f64) {
    let d2: Vec<f64> = points.iter().map(|p| compensated_sum(center.iter().zip(p).map(|(a, b)| (a - b) * (a - b)))).collect();
    let upper = d2.iter().fold(0.0f64, |m, d| m.max(*d)).sqrt();
    // Σλ|p_i − c|² ≤ Σλ|p_i − c*|² ≤ R*² for the λ-weighted mean c; evaluate
    // at that mean so the bound holds for any simplex weights.
    let total: f64 = compensated_sum(lambda.iter().copied());
    let mean: Vec<f64> = (0..center.len())
        .map(|k| compensated_sum(lambda.iter().zip(points).map(|(l, p)| l * p[k])) / total)
        .collect();
    let lower2 = compensated_sum(
        lambda.iter().zip(points).map(|(l, p)| l / total * compensated_sum(mean.iter().zip(p).map(|(a, b)| (a - b) * (a - b)))),
    );
    (center.to_vec(), upper, lower2.max(0.0).sqrt())
}

/// Equidistant point of the affine hull of the support with its barycentric
/// weights; `None` when the weights are not a valid simplex point.
fn polish_support(points: &[Vec<f64>], support: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
    let p0 = &points[*support.first()?];
    let m = support.len() - 1;
    let mut lambda = vec![0.0; points.len()];
    if m == 0 {
        lambda[support[0]] = 1.0;
        return Some((p0.clone(), lambda));
    }
    let q: Vec<Vec<f64>> = support[1..].iter().map(|&i| sub(&points[i], p0)).collect();
    let gram = DMatrix::from_fn(m, m, |a, b| 2.0 * dot(&q[a], &q[b]));
    let rhs = DVector::from_iterator(m, q.iter().map(|v| dot(v, v)));
    let mu = gram.svd(true, true).solve(&rhs, 1e-13).ok()?;
    let mut center = p0.clone();
    for (j, v) in q.iter().enumerate() {
        for (c, x) in center.iter_mut().zip(v) {
            *c += mu[j] * x;
        }
    }
    let w0 = 1.0 - mu.sum();
    if w0 < -1e-12 || mu.iter().any(|&x| x < -1e-12) {
        return None;
    }
    lambda[support[0]] = w0.max(0.0);
    for (j, &i) in support[1..].iter().enumerate() {
        lambda[i] = mu[j].max(0.0);
    }
    Some((center, lambda))
}

/// Subgradient descent on F(y) = max_i ‖y − p_i‖ with step c/√k, several
/// phases of shrinking c, best of `restarts` seeded starts. Iterates stay in
/// the bounding box of the points (which contains a minimizer for every
/// coordinate-monotone norm) and, for clamped hosts, in the ball.
pub fn subgradient_minimax(points: &[Vec<f64>], norm: &Norm, ball: Option<f64>, cfg: &SolverConfig) -> MinimaxSolution {
    let dim = points[0].len();
    let lo: Vec<f64> = (0..dim).map(|k| points.iter().fold(f64::INFINITY, |m, p| m.min(p[k]))).collect();
    let hi: Vec<f64> = (0..dim).map(|k| points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p[k]))).collect();
    let width = lo.iter().zip(&hi).fold(0.0f64, |m, (a, b)| m.max(b - a));
    let project = |y: &mut Vec<f64>| {
        for k in 0..dim {
            y[k] = y[k].clamp(lo[k], hi[k]);
        }
        if let Some(r) = ball {
            let n = norm.value(y);
            if n > r {
                for x in y.iter_mut() {
                    *x *= r / n;
                }
            }
        }
    };
    let objective = |y: &[f64]| points.iter().fold(0.0f64, |m, p| m.max(norm.value(&sub(y, p))));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best_overall: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0usize;
    for restart in 0..cfg.restarts.max(1) {
        let mut y: Vec<f64> = if restart == 0 && cfg.midpoint_start {
            lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()
        } else {
            lo.iter().zip(&hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()
        };
        project(&mut y);
        let mut best = (objective(&y), y.clone());
        let mut scale = 0.5 * width;
        for _ in 0..cfg.phases.max(1) {
            y = best.1.clone();
            for k in 1..=cfg.iterations {
                iterations += 1;
                let vals: Vec<f64> = points.iter().map(|p| norm.value(&sub(&y, p))).collect();
                let f = vals.iter().fold(0.0f64, |m, v| m.max(*v));
                if f < best.0 {
                    best = (f, y.clone());
                }
                if f == 0.0 {
                    break;
                }
                let mut g = vec![0.0; dim];
                for (p, v) in points.iter().zip(&vals) {
                    if *v >= f * (1.0 - 1e-12) {
                        for (gk, sk) in g.iter_mut().zip(norm.subgradient(&sub(&y, p))) {
                            *gk += sk;
                        }
                    }
                }
                let gl = crate::numeric::norm2(&g);
                if gl == 0.0 {
                    break;
                }
                let step = scale / (k as f64).sqrt() / gl;
                for (yk, gk) in y.iter_mut().zip(&g) {
                    *yk -= step * gk;
                }
                project(&mut y);
            }
            let f = objective(&y);
            if f < best.0 {
                best = (f, y.clone());
            }
            scale *= 0.1;
        }
        if best_overall.as_ref().is_none_or(|(b, _)| best.0 < *b) {
            best_overall = Some(best);
        }
    }
    let (radius, center) = best_overall.expect("at least one restart");
    let lower = dual_lower_bound(points, norm, &center, &lo, &hi);
    MinimaxSolution {
        center: Point::Vector(center),
        radius,
        gap: (radius - lower).max(0.0),
        iterations,
        method: "subgradient-minimax".into(),
    }
}

/// Certified lower bound on min_{z in box} max_i ‖z − p_i‖ from subgradients
/// at y: for g_i in the dual unit ball and λ in the simplex,
/// max_i ‖z − p_i‖ ≥ Σλ_i⟨g_i, z − p_i⟩ = Σλ_i⟨g_i, y − p_i⟩ + ⟨r, z − y⟩,
/// with r = Σλ_i g_i, minimized over the box coordinatewise.
pub fn dual_lower_bound(points: &[Vec<f64>], norm: &Norm, y: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let diffs: Vec<Vec<f64>> = points.iter().map(|p| sub(y, p)).collect();
    let vals: Vec<f64> = diffs.iter().map(|d| norm.value(d)).collect();
    let f = vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut best = 0.0f64;
    for tau in [1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 1e-1] {
        let mut atoms: Vec<(f64, Vec<f64>)> = Vec::new();
        for (d, v) in diffs.iter().zip(&vals) {
            if *v >= f * (1.0 - tau) {
                atoms.extend(norm.subgradient_atoms(d, tau));
            }
        }
        if atoms.is_empty() {
            continue;
        }
        let lambda = min_norm_weights(&atoms.iter().map(|a| a.1.clone()).collect::<Vec<_>>());
        let mut r = vec![0.0; y.len()];
        let mut base = 0.0;
        for ((val, g), l) in atoms.iter().zip(&lambda) {
            base += l * val;
            for (rk, gk) in r.iter_mut().zip(g) {
                *rk += l * gk;
            }
        }
        let shift = compensated_sum((0..y.len()).map(|k| (r[k] * lo[k]).min(r[k] * hi[k]) - r[k] * y[k]));
        best = best.max(base + shift);
    }
    best
}

/// Frank–Wolfe for the minimum-norm point of the convex hull of `atoms`.
fn min_norm_weights(atoms: &[Vec<f64>]) -> Vec<f64> {
    let m = atoms.len();
    let mut lambda = vec![0.0; m];
    lambda[0] = 1.0;
    let mut x = atoms[0].clone();
    for _ in 0..2000 {
        let (s, _) = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (i, dot(&x, a)))
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let d = sub(&x, &atoms[s]);
        let num = dot(&x, &d);
        let den = dot(&d, &d);
        if num <= 1e-15 || den == 0.0 {
            break;
        }
        let gamma = (num / den).clamp(0.0, 1.0);
        for l in lambda.iter_mut() {
            *l *= 1.0 - gamma;
        }
        lambda[s] += gamma;
        x = x.iter().zip(&atoms[s]).map(|(a, b)| a + gamma * (b - a)).collect();
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosing_ball_of_triangle() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]];
        let s = enclosing_ball(&pts, 0);
        let c = s.center.as_vector().unwrap();
        assert!((s.radius - 1.0).abs() < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);
        assert!(s.gap <= 1e-9);
    }

    #[test]
    fn enclosing_ball_in_higher_dimension() {
        // unit vectors in R^6: center is the centroid, radius sqrt(1 - 1/6)
        let pts: Vec<Vec<f64>> = (0..6).map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let s = enclosing_ball(&pts, 3);
        assert!((s.radius - (5.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert!(s.gap <= 1e-9);
    }

    #[test]
    fn sup_norm_lower_bound_is_tight_on_a_segment() {
        let pts = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let lb = dual_lower_bound(&pts, &Norm::Sup, &[0.0, 0.0], &[-1.0, 0.0], &[1.0, 0.0]);
        assert!((lb - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subgradient_solver_on_lp_pair() {
        let pts = vec![vec![1.0, 0.5], vec![-1.0, -0.5]];
        let s = subgradient_minimax(&pts, &Norm::Lp(3.0), None, &SolverConfig::default());
        let r = Norm::Lp(3.0).value(&[1.0, 0.5]);
        assert!((s.radius - r).abs() < 1e-6, "{} vs {}", s.radius, r);
        assert!(s.gap < 1e-5, "gap {}", s.gap);
    }
}
